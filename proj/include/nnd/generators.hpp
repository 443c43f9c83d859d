#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nnd/core.hpp"
#include "nnd/generator_config.hpp"

namespace nnd {

struct DegreeGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> degrees;
};

// Dense symmetric n x n matrix.
struct SquareMatrix {
  int n = 0;
  std::vector<double> data;

  SquareMatrix() = default;
  explicit SquareMatrix(int size, double fill = 0.0)
      : n(size), data(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), fill) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(j)];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(j)];
  }
};

Instance gen_rue(int n, std::uint64_t seed);
Instance gen_rne(int n, std::uint64_t seed, double mean, double sd);

// Barabasi-Albert growth. The m0 seed nodes form a path; every later node
// attaches to m distinct existing nodes drawn with probability proportional
// to degree. Throws Error(kInvalidConfig) unless 1 <= m <= m0 < n.
DegreeGraph ba_graph(int n, int m0, int m, std::uint64_t seed);

// d_uv = exp(-k (deg u + deg v)) for every pair, zero diagonal.
SquareMatrix degrees_to_distances(const DegreeGraph& graph, double k_attract);

struct LayoutResult {
  std::vector<Point> points;  // uniformly rescaled into [0,1]^2
  double scale = 1.0;         // factor mapping raw layout distances to `points`
  double initial_stress = 0.0;
  double final_stress = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Weighted stress sum_{u<v} w_uv (|p_u - p_v| - d_uv)^2 with w_uv = d_uv^-2.
double layout_stress(const SquareMatrix& targets, std::span<const Point> points);

// Stress majorization, node by node (each update is the exact minimizer of
// the majorizing quadratic, so stress never increases). Stops after
// `iterations` sweeps or once the relative stress decrease of a sweep drops
// below `tolerance`; `converged` records which happened.
LayoutResult spring_layout(const SquareMatrix& targets, int iterations, double tolerance,
                           std::uint64_t seed);

// Fruchterman-Reingold on the complete graph whose edge weights are
// `weights` (a larger weight pulls harder). Simultaneous updates, optimal
// spacing sqrt(1/n), linear cooling from a tenth of the initial extent;
// stops early once the mean displacement falls below `threshold`. The
// stress fields are left at zero.
LayoutResult force_layout(const SquareMatrix& weights, int iterations, double threshold,
                          std::uint64_t seed);

Instance gen_scale_free(const ScaleFreeConfig& cfg, std::uint64_t seed);
Instance gen_parallel_perturbed(const ParallelConfig& cfg, std::uint64_t seed);
Instance gen_convolution(const ConvolutionConfig& cfg, std::uint64_t seed);

// Dispatch on the family. The returned instance records (config, seed).
Instance generate(const FamilyConfig& family, std::uint64_t seed);

// Instance i uses sub_seed(master_seed, i) (see rng.hpp). Output is
// identical for every `jobs` value.
std::vector<Instance> gen_batch(const GeneratorConfig& cfg, std::size_t count, int jobs = 1);

// Augmentation sweep over Algorithm-2 noise levels: alpha ~ U[0,1],
// sigma_small log-uniform on [1e-4, 1e-1], sigma_large = sigma_small * 10^U[0,2].
// Line gap, rotation and rescaling come from `base`.
ParallelConfig sweep_parallel_config(const ParallelConfig& base, std::uint64_t seed);

// Instance i uses seed sub_seed(master_seed, i) for both its parameters and
// its points; provenance records the concrete parameters.
std::vector<Instance> gen_parallel_sweep(const ParallelConfig& base, std::size_t count,
                                         std::uint64_t master_seed, int jobs = 1);

std::string instance_name(const FamilyConfig& family, std::uint64_t index);

}  // namespace nnd
