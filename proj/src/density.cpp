#include "nnd/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nnd/error.hpp"
#include "nnd/parallel.hpp"
#include "nnd/spatial_index.hpp"

namespace nnd {

namespace {

constexpr int kIndexThreshold = 64;
// Slack on index query radii so that bit-level differences between image
// and wraparound distances never drop a candidate.
constexpr double kRadiusSlack = 1e-9;

void check_tie_eps(double tie_eps) {
  if (!(tie_eps >= 0.0) || !std::isfinite(tie_eps)) {
    throw Error(ErrorCode::kInvalidInput, "tie_eps must be finite and >= 0");
  }
}

// Filters candidate ids to the tie group of the closest one.
void tie_group(const Instance& inst, NodeId i, std::span<const NodeId> candidates, Metric metric,
               double tie_eps, std::vector<NodeId>& out, double& r1) {
  r1 = std::numeric_limits<double>::infinity();
  for (NodeId j : candidates) {
    r1 = std::min(r1, metric_distance(inst.nodes[static_cast<std::size_t>(i)],
                                      inst.nodes[static_cast<std::size_t>(j)], metric));
  }
  const double limit = r1 * (1.0 + tie_eps);
  out.clear();
  for (NodeId j : candidates) {
    if (metric_distance(inst.nodes[static_cast<std::size_t>(i)],
                        inst.nodes[static_cast<std::size_t>(j)], metric) <= limit) {
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
}

NeighborSets brute_force_sets(const Instance& inst, Metric metric, double tie_eps) {
  const int n = inst.size();
  NeighborSets result{std::vector<std::vector<NodeId>>(static_cast<std::size_t>(n)),
                      std::vector<double>(static_cast<std::size_t>(n)), metric, tie_eps};
  std::vector<NodeId> others;
  others.reserve(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    others.clear();
    for (NodeId j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    tie_group(inst, i, others, metric, tie_eps, result.sets[static_cast<std::size_t>(i)],
              result.nearest[static_cast<std::size_t>(i)]);
  }
  return result;
}

NeighborSets indexed_sets(const Instance& inst, Metric metric, double tie_eps) {
  const int n = inst.size();
  NeighborSets result{std::vector<std::vector<NodeId>>(static_cast<std::size_t>(n)),
                      std::vector<double>(static_cast<std::size_t>(n)), metric, tie_eps};
  const KdTree tree(inst.nodes, metric == Metric::kTorus);
  std::vector<NodeId> candidates;
  for (NodeId i = 0; i < n; ++i) {
    const Point& p = inst.nodes[static_cast<std::size_t>(i)];
    const double d0 = tree.knn(p, 1, i).front().distance;
    double radius = d0 * (1.0 + tie_eps);
    if (metric == Metric::kTsplib) radius = tsplib_round(d0) * (1.0 + tie_eps) + 0.5;
    radius = radius * (1.0 + kRadiusSlack) + kRadiusSlack;
    candidates.clear();
    for (const auto& hit : tree.within(p, radius, i)) candidates.push_back(hit.id);
    tie_group(inst, i, candidates, metric, tie_eps, result.sets[static_cast<std::size_t>(i)],
              result.nearest[static_cast<std::size_t>(i)]);
  }
  return result;
}

double mean_of(std::span<const double> values) {
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  return pairwise_sum(sq) / static_cast<double>(values.size() - 1);
}

}  // namespace

NeighborSets nn_sets(const Instance& instance, Metric metric, double tie_eps, NnMethod method) {
  check_tie_eps(tie_eps);
  if (instance.size() < 2) throw Error(ErrorCode::kInvalidInput, "nn_sets needs at least 2 nodes");
  if (method == NnMethod::kAuto) {
    method = instance.size() > kIndexThreshold ? NnMethod::kIndexed : NnMethod::kBruteForce;
  }
  return method == NnMethod::kIndexed ? indexed_sets(instance, metric, tie_eps)
                                      : brute_force_sets(instance, metric, tie_eps);
}

Metric default_density_metric(Metric instance_metric) noexcept {
  return instance_metric == Metric::kTsplib ? Metric::kExact : instance_metric;
}

double default_tie_eps(Metric instance_metric) noexcept {
  return instance_metric == Metric::kTsplib ? 1e-9 : 0.0;
}

DensityReport rho(const Instance& instance, std::span<const NodeId> order,
                  const NeighborSets& sets) {
  const int n = instance.size();
  if (sets.size() != n) {
    throw Error(ErrorCode::kInvalidInput, "neighbour sets cover " + std::to_string(sets.size()) +
                                              " nodes, instance has " + std::to_string(n));
  }
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::kInvalidInput, "tour has " + std::to_string(order.size()) +
                                              " nodes, instance has " + std::to_string(n));
  }
  check_permutation(order, n);
  const auto adjacent = tour_neighbors(order);

  DensityReport report;
  report.metric = sets.metric;
  report.tie_eps = sets.tie_eps;
  report.per_node.resize(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    const auto& set = sets.sets[static_cast<std::size_t>(i)];
    const auto [pred, succ] = adjacent[static_cast<std::size_t>(i)];
    int covered = 0;
    for (NodeId j : set) covered += (j == pred || j == succ) ? 1 : 0;
    report.per_node[static_cast<std::size_t>(i)] =
        static_cast<double>(covered) / static_cast<double>(set.size());
    if (set.size() > 1) ++report.tie_count;
  }
  report.rho = mean_of(report.per_node);
  return report;
}

DensityReport rho(const Instance& instance, std::span<const NodeId> order,
                  const DensityOptions& options) {
  const Metric metric = options.metric.value_or(default_density_metric(instance.metric));
  const double eps = options.tie_eps.value_or(default_tie_eps(instance.metric));
  return rho(instance, order, nn_sets(instance, metric, eps));
}

std::vector<HistogramBin> histogram(std::span<const double> values, int bins, double lo,
                                    double hi) {
  if (bins < 1) throw Error(ErrorCode::kInvalidInput, "histogram needs at least one bin");
  if (!(hi > lo)) throw Error(ErrorCode::kInvalidInput, "histogram range is empty");
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  const double width = hi - lo;
  for (int b = 0; b < bins; ++b) {
    out[static_cast<std::size_t>(b)].left = lo + width * b / bins;
    out[static_cast<std::size_t>(b)].right = lo + width * (b + 1) / bins;
  }
  for (double v : values) {
    if (!(v >= lo && v <= hi)) continue;
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / width * bins));
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

RhoSummary summarize_rho(std::vector<double> values, int bins) {
  if (values.empty()) throw Error(ErrorCode::kInvalidInput, "no rho values to summarize");
  RhoSummary s;
  s.count = values.size();
  s.mean = mean_of(values);
  s.sd = std::sqrt(sample_variance(values, s.mean));
  s.bins = histogram(values, bins);
  s.values = std::move(values);
  return s;
}

RhoSummary rho_batch(std::span<const Instance> instances,
                     std::span<const std::vector<NodeId>> tours, const DensityOptions& options,
                     int bins, int jobs) {
  if (instances.size() != tours.size()) {
    throw Error(ErrorCode::kInvalidInput, std::to_string(instances.size()) + " instances but " +
                                              std::to_string(tours.size()) + " tours");
  }
  std::vector<double> values(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    values[i] = rho(instances[i], tours[i], options).rho;
  });
  return summarize_rho(std::move(values), bins);
}

double defect_rate(std::span<const double> gaps, double threshold) {
  if (gaps.empty()) throw Error(ErrorCode::kInvalidInput, "defect rate of an empty gap list");
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(ErrorCode::kInvalidInput, "defect threshold must be finite and > 0");
  }
  const auto defects = std::count_if(gaps.begin(), gaps.end(), [&](double g) { return g > threshold; });
  return static_cast<double>(defects) / static_cast<double>(gaps.size());
}

std::vector<DefectBin> defect_by_rho(std::span<const double> rhos, std::span<const double> gaps,
                                     double threshold, int bins) {
  if (rhos.size() != gaps.size()) {
    throw Error(ErrorCode::kInvalidInput, "rho and gap lists differ in length");
  }
  if (bins < 1) throw Error(ErrorCode::kInvalidInput, "need at least one bin");
  defect_rate(gaps, threshold);  // validates

  std::vector<std::size_t> idx(rhos.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rhos[a] < rhos[b]; });

  std::vector<DefectBin> out;
  const std::size_t m = idx.size();
  for (int b = 0; b < bins; ++b) {
    const std::size_t lo = m * static_cast<std::size_t>(b) / static_cast<std::size_t>(bins);
    const std::size_t hi = m * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(bins);
    if (lo == hi) continue;
    DefectBin bin;
    bin.rho_low = rhos[idx[lo]];
    bin.rho_high = rhos[idx[hi - 1]];
    bin.count = hi - lo;
    std::vector<double> g;
    for (std::size_t k = lo; k < hi; ++k) {
      g.push_back(gaps[idx[k]]);
      if (gaps[idx[k]] > threshold) ++bin.defects;
    }
    bin.mean_gap = mean_of(g);
    bin.rate = static_cast<double>(bin.defects) / static_cast<double>(bin.count);
    out.push_back(bin);
  }
  return out;
}

std::vector<double> NnDistanceStats::column(int k) const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = r(i, k);
  return out;
}

NnDistanceStats nn_distance_samples(const Instance& instance, int k_max,
                                    std::optional<Metric> metric_opt) {
  const int n = instance.size();
  if (k_max < 1 || k_max >= n) {
    throw Error(ErrorCode::kInvalidInput,
                "k_max must lie in [1, n-1], got " + std::to_string(k_max));
  }
  const Metric metric = metric_opt.value_or(instance.metric);
  NnDistanceStats stats;
  stats.n = n;
  stats.k_max = k_max;
  stats.samples.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(k_max));

  std::optional<KdTree> tree;
  if (n > kIndexThreshold) tree.emplace(instance.nodes, metric == Metric::kTorus);
  std::vector<double> row;
  for (NodeId i = 0; i < n; ++i) {
    const Point& p = instance.nodes[static_cast<std::size_t>(i)];
    row.clear();
    if (tree) {
      for (const auto& hit : tree->knn(p, k_max, i)) {
        row.push_back(metric_distance(p, instance.nodes[static_cast<std::size_t>(hit.id)], metric));
      }
      std::sort(row.begin(), row.end());
    } else {
      for (NodeId j = 0; j < n; ++j) {
        if (j != i) row.push_back(metric_distance(p, instance.nodes[static_cast<std::size_t>(j)], metric));
      }
      std::partial_sort(row.begin(), row.begin() + k_max, row.end());
    }
    std::copy(row.begin(), row.begin() + k_max,
              stats.samples.begin() + static_cast<std::ptrdiff_t>(i) * k_max);
  }
  for (int k = 1; k <= k_max; ++k) {
    const auto col = stats.column(k);
    const double m = mean_of(col);
    stats.mean.push_back(m);
    stats.variance.push_back(sample_variance(col, m));
  }
  return stats;
}

}  // namespace nnd
