#pragma once

#include <span>
#include <utility>
#include <vector>

#include "nnd/core.hpp"

namespace nnd {

// Static 2-d tree over a point set. In periodic mode the unit square is
// tiled with the eight neighbouring images, so Euclidean queries answer
// torus-distance questions for points inside [0,1]^2.
class KdTree {
 public:
  struct Hit {
    double distance;
    NodeId id;

    friend bool operator<(const Hit& a, const Hit& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    }
  };

  explicit KdTree(std::span<const Point> points, bool periodic = false);

  // The k nearest distinct ids (excluding `exclude`), sorted by (distance, id).
  std::vector<Hit> knn(const Point& query, int k, NodeId exclude = -1) const;

  // Every distinct id within `radius` (inclusive), sorted by (distance, id).
  std::vector<Hit> within(const Point& query, double radius, NodeId exclude = -1) const;

  std::size_t size() const noexcept { return ids_.size(); }

 private:
  struct Node {
    int begin, end;     // range in pts_/ids_
    int left, right;    // children, -1 for leaves
    int axis;
    double split;
    double min_x, max_x, min_y, max_y;
  };

  int build(int begin, int end);
  static double box_distance2(const Node& node, const Point& q);
  void knn_rec(int node, const Point& q, int k, NodeId exclude, std::vector<Hit>& best) const;
  void within_rec(int node, const Point& q, double r2, NodeId exclude,
                  std::vector<Hit>& out) const;

  std::vector<Point> pts_;
  std::vector<NodeId> ids_;
  std::vector<Node> nodes_;
};

}  // namespace nnd
