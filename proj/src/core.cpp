#include "nnd/core.hpp"

#include <cctype>
#include <algorithm>
#include <string>

#include "nnd/error.hpp"

namespace nnd {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kExact: return "exact";
    case Metric::kTsplib: return "tsplib";
    case Metric::kTorus: return "torus";
  }
  return "exact";
}

Metric parse_metric(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "exact" || lower == "euclidean") return Metric::kExact;
  if (lower == "tsplib" || lower == "euc_2d") return Metric::kTsplib;
  if (lower == "torus") return Metric::kTorus;
  throw Error(ErrorCode::kInvalidInput, "unknown metric '" + std::string(text) + "'");
}

namespace {

void check_point(const Point& p, Metric metric) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw Error(ErrorCode::kInvalidInput, "non-finite coordinate");
  }
  if (metric == Metric::kTorus && (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "torus metric requires coordinates in [0,1]");
  }
}

}  // namespace

double distance(const Point& a, const Point& b, Metric metric) {
  check_point(a, metric);
  check_point(b, metric);
  return metric_distance(a, b, metric);
}

Instance::Instance(std::string name_, std::vector<Point> nodes_, Metric metric_,
                   std::optional<Provenance> provenance_)
    : name(std::move(name_)),
      nodes(std::move(nodes_)),
      metric(metric_),
      provenance(std::move(provenance_)) {
  if (nodes.size() < 3) {
    throw Error(ErrorCode::kInvalidInput,
                "instance needs at least 3 nodes, got " + std::to_string(nodes.size()));
  }
  for (const auto& p : nodes) check_point(p, metric);
}

DistanceMatrix::DistanceMatrix(std::span<const Point> points, Metric metric)
    : n_(static_cast<int>(points.size())),
      data_(points.size() * points.size(), 0.0) {
  const auto n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = metric_distance(points[i], points[j], metric);
      data_[i * n + j] = d;
      data_[j * n + i] = d;
    }
  }
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void check_permutation(std::span<const NodeId> order, int n) {
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::kInvalidTour, "tour has " + std::to_string(order.size()) +
                                             " entries, expected " + std::to_string(n));
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (NodeId v : order) {
    if (v < 0 || v >= n) {
      throw Error(ErrorCode::kInvalidTour, "node index " + std::to_string(v) + " out of range");
    }
    if (seen[static_cast<std::size_t>(v)]) {
      throw Error(ErrorCode::kInvalidTour, "node index " + std::to_string(v) + " repeated");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

std::vector<NodeId> canonical_order(std::span<const NodeId> order) {
  const std::size_t n = order.size();
  std::vector<NodeId> out(order.begin(), order.end());
  if (n < 2) return out;
  const auto zero = std::min_element(out.begin(), out.end());
  std::rotate(out.begin(), zero, out.end());
  if (n > 2 && out[1] > out[n - 1]) std::reverse(out.begin() + 1, out.end());
  return out;
}

namespace {

template <typename DistFn>
double closed_length(std::span<const NodeId> order, DistFn&& dist) {
  const auto canon = canonical_order(order);
  const std::size_t n = canon.size();
  std::vector<double> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    edges[i] = dist(canon[i], canon[(i + 1) % n]);
  }
  return pairwise_sum(edges);
}

}  // namespace

double tour_length(const Instance& instance, std::span<const NodeId> order) {
  check_permutation(order, instance.size());
  const auto& pts = instance.nodes;
  const Metric metric = instance.metric;
  return closed_length(order, [&](NodeId a, NodeId b) {
    return metric_distance(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)],
                           metric);
  });
}

double tour_length(const DistanceMatrix& dist, std::span<const NodeId> order) {
  check_permutation(order, dist.size());
  return closed_length(order, [&](NodeId a, NodeId b) { return dist(a, b); });
}

Tour make_tour(const Instance& instance, std::vector<NodeId> order) {
  const double len = tour_length(instance, order);
  return Tour{std::move(order), len};
}

std::vector<std::pair<NodeId, NodeId>> tour_neighbors(std::span<const NodeId> order) {
  const std::size_t n = order.size();
  std::vector<std::pair<NodeId, NodeId>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    adj[static_cast<std::size_t>(order[i])] = {order[(i + n - 1) % n], order[(i + 1) % n]};
  }
  return adj;
}

double optimality_gap(double candidate_length, double reference_length, double tolerance) {
  if (!(reference_length > 0.0) || !std::isfinite(reference_length)) {
    throw Error(ErrorCode::kInvalidInput, "reference length must be positive");
  }
  if (!std::isfinite(candidate_length)) {
    throw Error(ErrorCode::kInvalidInput, "candidate length must be finite");
  }
  if (candidate_length < reference_length * (1.0 - tolerance)) {
    warn("candidate tour is shorter than the reference (" + std::to_string(candidate_length) +
         " < " + std::to_string(reference_length) + "); reference is not optimal");
  }
  return candidate_length / reference_length - 1.0;
}

GapSummary summarize_gaps(std::span<const double> candidate_lengths,
                          std::span<const double> reference_lengths) {
  if (candidate_lengths.size() != reference_lengths.size() || candidate_lengths.empty()) {
    throw Error(ErrorCode::kInvalidInput, "gap summary needs equal-length, nonempty inputs");
  }
  const std::size_t n = candidate_lengths.size();
  std::vector<double> gaps(n);
  for (std::size_t i = 0; i < n; ++i) {
    gaps[i] = optimality_gap(candidate_lengths[i], reference_lengths[i]);
  }
  GapSummary s;
  s.count = n;
  s.mean_of_gaps = pairwise_sum(gaps) / static_cast<double>(n);
  s.ratio_of_mean_lengths = pairwise_sum(candidate_lengths) / pairwise_sum(reference_lengths) - 1.0;
  return s;
}

}  // namespace nnd
