#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nnd/core.hpp"

namespace nnd {

struct NeighborSets {
  // sets[i]: every j != i with d(i, j) <= r1(i) * (1 + tie_eps), ascending ids.
  std::vector<std::vector<NodeId>> sets;
  std::vector<double> nearest;  // r1(i)
  Metric metric = Metric::kExact;
  double tie_eps = 0.0;

  int size() const noexcept { return static_cast<int>(sets.size()); }
};

enum class NnMethod { kAuto, kBruteForce, kIndexed };

// Both methods give identical sets; kAuto indexes above 64 nodes.
NeighborSets nn_sets(const Instance& instance, Metric metric, double tie_eps,
                     NnMethod method = NnMethod::kAuto);

// Neighbour sets are geometric: TSPLIB instances use exact Euclidean
// distances for them, while tours stay optimal under rounding.
Metric default_density_metric(Metric instance_metric) noexcept;
// 0 for synthetic metrics, 1e-9 (relative) for TSPLIB grids.
double default_tie_eps(Metric instance_metric) noexcept;

struct DensityOptions {
  std::optional<Metric> metric;
  std::optional<double> tie_eps;
};

struct DensityReport {
  double rho = 0.0;
  std::vector<double> per_node;  // |N(i) ∩ N'(i)| / |N(i)|
  int tie_count = 0;             // nodes with more than one nearest neighbour
  Metric metric = Metric::kExact;
  double tie_eps = 0.0;
};

// Throws Error(kInvalidInput) if the sets do not match the instance size and
// Error(kInvalidTour) if `order` is not a permutation.
DensityReport rho(const Instance& instance, std::span<const NodeId> order,
                  const NeighborSets& sets);
DensityReport rho(const Instance& instance, std::span<const NodeId> order,
                  const DensityOptions& options = {});

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

// Equal-width bins on [lo, hi]; the right edge belongs to the last bin.
std::vector<HistogramBin> histogram(std::span<const double> values, int bins, double lo = 0.0,
                                    double hi = 1.0);

struct RhoSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  std::vector<double> values;
  std::vector<HistogramBin> bins;
};

RhoSummary summarize_rho(std::vector<double> values, int bins = 20);

// Throws Error(kInvalidInput) when the lists differ in length or are empty.
RhoSummary rho_batch(std::span<const Instance> instances,
                     std::span<const std::vector<NodeId>> tours,
                     const DensityOptions& options = {}, int bins = 20, int jobs = 1);

inline constexpr double kDefaultDefectThreshold = 0.001;

// Fraction of gaps strictly above `threshold`.
double defect_rate(std::span<const double> gaps, double threshold = kDefaultDefectThreshold);

struct DefectBin {
  double rho_low = 0.0;
  double rho_high = 0.0;
  std::size_t count = 0;
  std::size_t defects = 0;
  double mean_gap = 0.0;
  double rate = 0.0;
};

// Instances sorted by rho and split into `bins` equal-count groups.
std::vector<DefectBin> defect_by_rho(std::span<const double> rhos, std::span<const double> gaps,
                                     double threshold = kDefaultDefectThreshold, int bins = 10);

struct NnDistanceStats {
  int n = 0;
  int k_max = 0;
  std::vector<double> samples;  // row-major n x k_max, r_1 <= ... <= r_k_max per row
  std::vector<double> mean;     // per k, index 0 is r_1
  std::vector<double> variance; // sample variance per k

  double r(NodeId i, int k) const {
    return samples[static_cast<std::size_t>(i) * static_cast<std::size_t>(k_max) +
                   static_cast<std::size_t>(k - 1)];
  }
  std::vector<double> column(int k) const;
};

// Uses the instance metric unless `metric` is given. Requires 1 <= k_max < n.
NnDistanceStats nn_distance_samples(const Instance& instance, int k_max,
                                    std::optional<Metric> metric = std::nullopt);

}  // namespace nnd
