#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnd/generator_config.hpp"

namespace nnd {

using NodeId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class Metric {
  kExact,   // plain Euclidean
  kTsplib,  // TSPLIB EUC_2D: Euclidean rounded to the nearest integer
  kTorus,   // Euclidean with wraparound on the unit square
};

std::string_view to_string(Metric metric);
// Accepts "exact", "tsplib", "torus" (and the TSPLIB spelling "euc_2d").
Metric parse_metric(std::string_view text);

// Exact Euclidean distance with no validation; the hot path for solvers.
inline double euclidean(const Point& a, const Point& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// TSPLIB nint(): round half away from zero of a nonnegative value.
inline double tsplib_round(double d) noexcept { return std::floor(d + 0.5); }

inline double torus_distance(const Point& a, const Point& b) noexcept {
  double dx = std::fabs(a.x - b.x);
  double dy = std::fabs(a.y - b.y);
  dx = std::fmin(dx, 1.0 - dx);
  dy = std::fmin(dy, 1.0 - dy);
  return std::hypot(dx, dy);
}

// Unchecked dispatch; callers that accept user input go through distance().
inline double metric_distance(const Point& a, const Point& b, Metric metric) noexcept {
  switch (metric) {
    case Metric::kTsplib: return tsplib_round(euclidean(a, b));
    case Metric::kTorus: return torus_distance(a, b);
    case Metric::kExact: break;
  }
  return euclidean(a, b);
}

// Validated distance. Throws Error(kInvalidInput) on non-finite coordinates
// or, in torus mode, coordinates outside [0,1].
double distance(const Point& a, const Point& b, Metric metric);

struct Provenance {
  GeneratorConfig config;
  std::uint64_t seed = 0;  // sub-seed that produced this instance
  std::uint64_t index = 0;
};

struct Instance {
  std::string name;
  std::vector<Point> nodes;
  Metric metric = Metric::kExact;
  std::optional<Provenance> provenance;

  Instance() = default;
  // Throws Error(kInvalidInput) if fewer than 3 nodes or any coordinate is
  // not finite, or torus coordinates fall outside the unit square.
  Instance(std::string name, std::vector<Point> nodes, Metric metric = Metric::kExact,
           std::optional<Provenance> provenance = std::nullopt);

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

// Row-major n x n matrix of metric distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::span<const Point> points, Metric metric);
  explicit DistanceMatrix(const Instance& instance)
      : DistanceMatrix(instance.nodes, instance.metric) {}

  int size() const noexcept { return n_; }
  double operator()(NodeId i, NodeId j) const noexcept {
    return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                 static_cast<std::size_t>(j)];
  }
  std::span<const double> row(NodeId i) const noexcept {
    return {data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n_),
            static_cast<std::size_t>(n_)};
  }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

// Pairwise (tree) summation; the result depends only on the sequence, never
// on how the work producing it was scheduled.
double pairwise_sum(std::span<const double> values);

// Throws Error(kInvalidTour) unless `order` is a bijection on 0..n-1.
void check_permutation(std::span<const NodeId> order, int n);

// Rotates the cycle to start at node 0 and orients it so that the second
// entry is smaller than the last. Every rotation/reversal of one cycle maps
// to the same canonical sequence.
std::vector<NodeId> canonical_order(std::span<const NodeId> order);

// Closed-tour length under the instance metric. The edges are summed in
// canonical cycle order, so rotating or reversing `order` never changes the
// result, not even in the last bit.
double tour_length(const Instance& instance, std::span<const NodeId> order);
double tour_length(const DistanceMatrix& dist, std::span<const NodeId> order);

struct Tour {
  std::vector<NodeId> order;
  double length = 0.0;

  int size() const noexcept { return static_cast<int>(order.size()); }
};

// Validates the permutation and caches its length.
Tour make_tour(const Instance& instance, std::vector<NodeId> order);

// Tour-adjacent nodes of every node: {pred, succ}.
std::vector<std::pair<NodeId, NodeId>> tour_neighbors(std::span<const NodeId> order);

// candidate / reference - 1. Warns (does not throw) if the candidate is more
// than `tolerance` (relative) below the reference.
double optimality_gap(double candidate_length, double reference_length,
                      double tolerance = 1e-9);

struct GapSummary {
  double mean_of_gaps = 0.0;          // mean over instances of (c_i / r_i - 1)
  double ratio_of_mean_lengths = 0.0;  // mean(c) / mean(r) - 1
  std::size_t count = 0;
};

GapSummary summarize_gaps(std::span<const double> candidate_lengths,
                          std::span<const double> reference_lengths);

}  // namespace nnd
