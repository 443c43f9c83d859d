#include "nnd/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nnd {

namespace {

constexpr int kLeafSize = 8;

// Keeps the best entry per id; `hits` stays sorted and holds at most k ids.
void offer(std::vector<KdTree::Hit>& hits, int k, KdTree::Hit h) {
  for (auto it = hits.begin(); it != hits.end(); ++it) {
    if (it->id == h.id) {
      if (!(h < *it)) return;
      hits.erase(it);
      break;
    }
  }
  if (static_cast<int>(hits.size()) == k && !(h < hits.back())) return;
  hits.insert(std::upper_bound(hits.begin(), hits.end(), h), h);
  if (static_cast<int>(hits.size()) > k) hits.pop_back();
}

}  // namespace

KdTree::KdTree(std::span<const Point> points, bool periodic) {
  const int copies = periodic ? 9 : 1;
  pts_.reserve(points.size() * static_cast<std::size_t>(copies));
  ids_.reserve(pts_.capacity());
  for (int ox = -1; ox <= 1; ++ox) {
    for (int oy = -1; oy <= 1; ++oy) {
      if (!periodic && (ox != 0 || oy != 0)) continue;
      for (std::size_t i = 0; i < points.size(); ++i) {
        pts_.push_back({points[i].x + ox, points[i].y + oy});
        ids_.push_back(static_cast<NodeId>(i));
      }
    }
  }
  if (!pts_.empty()) build(0, static_cast<int>(pts_.size()));
}

int KdTree::build(int begin, int end) {
  Node node{begin, end, -1, -1, 0, 0.0,
            std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int i = begin; i < end; ++i) {
    const auto& p = pts_[static_cast<std::size_t>(i)];
    node.min_x = std::min(node.min_x, p.x);
    node.max_x = std::max(node.max_x, p.x);
    node.min_y = std::min(node.min_y, p.y);
    node.max_y = std::max(node.max_y, p.y);
  }
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return index;

  const int axis = (node.max_x - node.min_x) >= (node.max_y - node.min_y) ? 0 : 1;
  const int mid = begin + (end - begin) / 2;
  // Sort a permutation so points and ids move together.
  std::vector<int> perm(static_cast<std::size_t>(end - begin));
  for (int i = 0; i < end - begin; ++i) perm[static_cast<std::size_t>(i)] = begin + i;
  auto key = [&](int i) {
    const auto& p = pts_[static_cast<std::size_t>(i)];
    return axis == 0 ? p.x : p.y;
  };
  std::nth_element(perm.begin(), perm.begin() + (mid - begin), perm.end(),
                   [&](int a, int b) { return key(a) < key(b); });
  std::vector<Point> p2;
  std::vector<NodeId> id2;
  p2.reserve(perm.size());
  id2.reserve(perm.size());
  for (int i : perm) {
    p2.push_back(pts_[static_cast<std::size_t>(i)]);
    id2.push_back(ids_[static_cast<std::size_t>(i)]);
  }
  std::copy(p2.begin(), p2.end(), pts_.begin() + begin);
  std::copy(id2.begin(), id2.end(), ids_.begin() + begin);

  nodes_[static_cast<std::size_t>(index)].axis = axis;
  nodes_[static_cast<std::size_t>(index)].split = key(mid);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(index)].left = left;
  nodes_[static_cast<std::size_t>(index)].right = right;
  return index;
}

double KdTree::box_distance2(const Node& node, const Point& q) {
  const double dx = std::max({node.min_x - q.x, 0.0, q.x - node.max_x});
  const double dy = std::max({node.min_y - q.y, 0.0, q.y - node.max_y});
  return dx * dx + dy * dy;
}

void KdTree::knn_rec(int index, const Point& q, int k, NodeId exclude,
                     std::vector<Hit>& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(index)];
  if (static_cast<int>(best.size()) == k) {
    const double bound = best.back().distance;
    if (box_distance2(node, q) > bound * bound) return;
  }
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const NodeId id = ids_[static_cast<std::size_t>(i)];
      if (id == exclude) continue;
      offer(best, k, {euclidean(q, pts_[static_cast<std::size_t>(i)]), id});
    }
    return;
  }
  const double coord = node.axis == 0 ? q.x : q.y;
  const int first = coord < node.split ? node.left : node.right;
  const int second = first == node.left ? node.right : node.left;
  knn_rec(first, q, k, exclude, best);
  knn_rec(second, q, k, exclude, best);
}

std::vector<KdTree::Hit> KdTree::knn(const Point& query, int k, NodeId exclude) const {
  std::vector<Hit> best;
  if (k <= 0 || nodes_.empty()) return best;
  best.reserve(static_cast<std::size_t>(k) + 1);
  knn_rec(0, query, k, exclude, best);
  return best;
}

void KdTree::within_rec(int index, const Point& q, double r2, NodeId exclude,
                        std::vector<Hit>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(index)];
  if (box_distance2(node, q) > r2) return;
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const NodeId id = ids_[static_cast<std::size_t>(i)];
      if (id == exclude) continue;
      const double d = euclidean(q, pts_[static_cast<std::size_t>(i)]);
      if (d * d <= r2 * (1.0 + 1e-12)) out.push_back({d, id});
    }
    return;
  }
  within_rec(node.left, q, r2, exclude, out);
  within_rec(node.right, q, r2, exclude, out);
}

std::vector<KdTree::Hit> KdTree::within(const Point& query, double radius,
                                        NodeId exclude) const {
  std::vector<Hit> out;
  if (nodes_.empty() || radius < 0.0) return out;
  within_rec(0, query, radius * radius, exclude, out);
  std::sort(out.begin(), out.end());
  // Periodic images can report one id several times; keep the closest.
  std::vector<Hit> unique;
  std::vector<char> seen;
  for (const auto& h : out) {
    if (static_cast<std::size_t>(h.id) >= seen.size()) seen.resize(static_cast<std::size_t>(h.id) + 1, 0);
    if (seen[static_cast<std::size_t>(h.id)]) continue;
    seen[static_cast<std::size_t>(h.id)] = 1;
    unique.push_back(h);
  }
  return unique;
}

}  // namespace nnd
