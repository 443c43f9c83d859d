#include "nnd/generator_config.hpp"

#include <cmath>
#include <string>

#include "nnd/error.hpp"

namespace nnd {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

void require_n(int n) { require(n >= 3, "n must be at least 3, got " + std::to_string(n)); }

}  // namespace

std::string_view to_string(LayoutMethod method) {
  return method == LayoutMethod::kStress ? "stress" : "force";
}

LayoutMethod parse_layout_method(std::string_view text) {
  if (text == "force") return LayoutMethod::kForce;
  if (text == "stress") return LayoutMethod::kStress;
  throw Error(ErrorCode::kInvalidConfig, "unknown layout method '" + std::string(text) + "'");
}

std::string_view family_name(const FamilyConfig& family) {
  return std::visit(overloaded{
                        [](const RueConfig&) { return std::string_view("rue"); },
                        [](const RneConfig&) { return std::string_view("rne"); },
                        [](const ScaleFreeConfig&) { return std::string_view("scale-free"); },
                        [](const ParallelConfig&) { return std::string_view("parallel"); },
                        [](const ConvolutionConfig&) { return std::string_view("convolution"); },
                    },
                    family);
}

int family_size(const FamilyConfig& family) {
  return std::visit([](const auto& c) { return c.n; }, family);
}

void validate(const FamilyConfig& family) {
  std::visit(overloaded{
                 [](const RueConfig& c) { require_n(c.n); },
                 [](const RneConfig& c) {
                   require_n(c.n);
                   require(c.sd > 0.0, "rne: sd must be positive");
                   require(std::isfinite(c.mean), "rne: mean must be finite");
                 },
                 [](const ScaleFreeConfig& c) {
                   require_n(c.n);
                   require(c.m >= 1, "scale-free: m must be at least 1");
                   require(c.m <= c.m0, "scale-free: m must not exceed m0");
                   require(c.m0 < c.n, "scale-free: m0 must be smaller than n");
                   require(c.k_attract > 0.0, "scale-free: k must be positive");
                   require(c.layout_iterations >= 1, "scale-free: layout iterations must be >= 1");
                   require(c.layout_tolerance >= 0.0, "scale-free: layout tolerance must be >= 0");
                 },
                 [](const ParallelConfig& c) {
                   require_n(c.n);
                   require(c.n % 2 == 0, "parallel: n must be even, got " + std::to_string(c.n));
                   require(c.alpha >= 0.0 && c.alpha <= 1.0, "parallel: alpha must lie in [0,1]");
                   require(c.sigma_small >= 0.0, "parallel: sigma_small must be >= 0");
                   require(c.sigma_small <= c.sigma_large,
                           "parallel: sigma_small must not exceed sigma_large");
                   require(c.line_gap > 0.0 && c.line_gap < 1.0,
                           "parallel: line gap must lie in (0,1)");
                 },
                 [](const ConvolutionConfig& c) {
                   require_n(c.n);
                   require(c.lambda_max > 0.0 && c.lambda_max <= 1.0,
                           "convolution: lambda_max must lie in (0,1]");
                 },
             },
             family);
}

}  // namespace nnd
