#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace nnd {

// Random uniform Euclidean: coordinates i.i.d. on the unit square.
struct RueConfig {
  int n = 50;
};

// Random normal Euclidean: coordinates i.i.d. Normal(mean, sd) per axis.
struct RneConfig {
  int n = 50;
  double mean = 0.5;
  double sd = 0.15;
};

// kForce: Fruchterman-Reingold with the target matrix as attraction weights.
// kStress: stress majorization reproducing the targets as distances.
enum class LayoutMethod { kForce, kStress };

std::string_view to_string(LayoutMethod method);
LayoutMethod parse_layout_method(std::string_view text);

// Barabasi-Albert graph, degrees mapped to target distances, then embedded.
// Iteration and tolerance defaults suit kForce; stress layouts usually want
// about 500 sweeps at 1e-6.
struct ScaleFreeConfig {
  int n = 50;
  int m0 = 3;
  int m = 2;
  double k_attract = 0.5;
  LayoutMethod layout = LayoutMethod::kForce;
  int layout_iterations = 50;
  double layout_tolerance = 1e-4;
};

// Two parallel point rows with mixed Gaussian noise and a random rotation.
struct ParallelConfig {
  int n = 50;
  double line_gap = 0.05;
  double alpha = 0.0;
  double sigma_large = 0.0;
  double sigma_small = 0.0;
  bool rotate = true;
  bool rescale = true;
};

// Uniform point plus a zero-mean Gaussian with random diagonal covariance.
struct ConvolutionConfig {
  int n = 50;
  double lambda_max = 1.0;
};

using FamilyConfig =
    std::variant<RueConfig, RneConfig, ScaleFreeConfig, ParallelConfig, ConvolutionConfig>;

struct GeneratorConfig {
  FamilyConfig family = RueConfig{};
  std::uint64_t master_seed = 0;
};

std::string_view family_name(const FamilyConfig& family);
int family_size(const FamilyConfig& family);

// Throws Error(kInvalidConfig) naming the violated constraint.
void validate(const FamilyConfig& family);

}  // namespace nnd
