#include "nnd/solvers.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

#include "nnd/error.hpp"
#include "nnd/parallel.hpp"
#include "nnd/rng.hpp"

namespace nnd {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::kNearestNeighbor: return "nn";
    case Algorithm::kExactDp: return "exact";
    case Algorithm::kLocalSearch: return "ls";
  }
  return "ls";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "nn" || text == "nearest-neighbor") return Algorithm::kNearestNeighbor;
  if (text == "exact" || text == "dp" || text == "held-karp") return Algorithm::kExactDp;
  if (text == "ls" || text == "local-search") return Algorithm::kLocalSearch;
  throw Error(ErrorCode::kInvalidConfig, "unknown algorithm '" + std::string(text) + "'");
}

std::vector<NodeId> nn_order(const DistanceMatrix& dist, NodeId start) {
  const int n = dist.size();
  if (start < 0 || start >= n) {
    throw Error(ErrorCode::kInvalidInput, "start node " + std::to_string(start) + " out of range");
  }
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<NodeId> order;
  order.reserve(static_cast<std::size_t>(n));
  NodeId cur = start;
  visited[static_cast<std::size_t>(cur)] = 1;
  order.push_back(cur);
  for (int step = 1; step < n; ++step) {
    NodeId best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    const auto row = dist.row(cur);
    for (NodeId j = 0; j < n; ++j) {
      if (!visited[static_cast<std::size_t>(j)] && row[static_cast<std::size_t>(j)] < best_d) {
        best_d = row[static_cast<std::size_t>(j)];
        best = j;
      }
    }
    visited[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
    cur = best;
  }
  return order;
}

Tour nn_tour(const Instance& instance, NodeId start) {
  const DistanceMatrix dist(instance);
  return make_tour(instance, nn_order(dist, start));
}

Tour exact_tour(const Instance& instance) {
  const int n = instance.size();
  if (n > kExactMaxNodes) {
    throw Error(ErrorCode::kSizeLimit, "exact solver is limited to n <= " +
                                           std::to_string(kExactMaxNodes) + " (got " +
                                           std::to_string(n) + "); use local search");
  }
  const DistanceMatrix dist(instance);
  // Node 0 is the fixed start; nodes 1..n-1 map to bits 0..m-1.
  const int m = n - 1;
  const std::size_t full = (std::size_t{1} << m) - 1;
  const auto um = static_cast<std::size_t>(m);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost((full + 1) * um, kInf);
  std::vector<double> d(um * um);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) d[static_cast<std::size_t>(i) * um + static_cast<std::size_t>(j)] = dist(i + 1, j + 1);
  }
  for (int j = 0; j < m; ++j) cost[(std::size_t{1} << j) * um + static_cast<std::size_t>(j)] = dist(0, j + 1);

  for (std::size_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;
    double* row = &cost[mask * um];
    for (std::size_t rest = mask; rest; rest &= rest - 1) {
      const auto j = static_cast<std::size_t>(__builtin_ctzll(rest));
      const std::size_t prev = mask ^ (std::size_t{1} << j);
      const double* prev_row = &cost[prev * um];
      double best = kInf;
      for (std::size_t bits = prev; bits; bits &= bits - 1) {
        const auto i = static_cast<std::size_t>(__builtin_ctzll(bits));
        const double c = prev_row[i] + d[i * um + j];
        if (c < best) best = c;
      }
      row[j] = best;
    }
  }

  // Reconstruct backwards, preferring the lowest index among exact ties.
  std::size_t mask = full;
  std::size_t last = 0;
  double best = kInf;
  for (std::size_t j = 0; j < um; ++j) {
    const double c = cost[full * um + j] + dist(static_cast<NodeId>(j) + 1, 0);
    if (c < best) {
      best = c;
      last = j;
    }
  }
  std::vector<NodeId> rev;
  rev.reserve(um);
  while (true) {
    rev.push_back(static_cast<NodeId>(last) + 1);
    const std::size_t prev = mask ^ (std::size_t{1} << last);
    if (prev == 0) break;
    const double target = cost[mask * um + last];
    std::size_t pick = um;
    for (std::size_t bits = prev; bits; bits &= bits - 1) {
      const auto i = static_cast<std::size_t>(__builtin_ctzll(bits));
      if (cost[prev * um + i] + d[i * um + last] == target) {
        pick = i;
        break;
      }
    }
    mask = prev;
    last = pick;
  }
  std::vector<NodeId> order{0};
  order.insert(order.end(), rev.rbegin(), rev.rend());
  return make_tour(instance, canonical_order(order));
}

namespace {

// Array-based tour with 2-opt and Or-opt moves. `tour_` maps positions to
// nodes and `pos_` is its inverse.
class TourImprover {
 public:
  TourImprover(const DistanceMatrix& dist, int neighbor_k)
      : dist_(dist), n_(dist.size()) {
    const int k = std::min(neighbor_k, n_ - 1);
    neighbors_.resize(static_cast<std::size_t>(n_));
    std::vector<NodeId> idx(static_cast<std::size_t>(n_));
    for (NodeId a = 0; a < n_; ++a) {
      idx.clear();
      for (NodeId b = 0; b < n_; ++b) {
        if (b != a) idx.push_back(b);
      }
      std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](NodeId x, NodeId y) {
        const double dx = dist_(a, x), dy = dist_(a, y);
        return dx < dy || (dx == dy && x < y);
      });
      neighbors_[static_cast<std::size_t>(a)].assign(idx.begin(), idx.begin() + k);
    }
    queued_.assign(static_cast<std::size_t>(n_), 0);
  }

  void load(std::span<const NodeId> order) {
    tour_.assign(order.begin(), order.end());
    pos_.assign(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) pos_[static_cast<std::size_t>(tour_[static_cast<std::size_t>(i)])] = i;
    length_ = 0.0;
    for (int i = 0; i < n_; ++i) length_ += d(tour_[static_cast<std::size_t>(i)], tour_[static_cast<std::size_t>((i + 1) % n_)]);
  }

  const std::vector<NodeId>& order() const { return tour_; }
  double length() const { return length_; }

  // Candidate-pruned search from the queued nodes, then exhaustive passes
  // until no move of either kind improves.
  void optimize() {
    if (n_ < 4) return;
    for (;;) {
      run_queue();
      if (!find_two_opt_exhaustive(true) && !find_or_opt_exhaustive(true)) break;
    }
  }

  // Candidate-pruned search only, seeded by the given nodes.
  void optimize_local(std::span<const NodeId> touched) {
    if (n_ < 4) return;
    for (NodeId v : touched) push(v);
    run_queue();
  }

  void activate_all() {
    for (NodeId v = 0; v < n_; ++v) push(v);
  }

  // A C B D rearrangement of three random cuts; for tiny tours a random
  // segment reversal. Returns the nodes whose tour neighbors changed.
  std::vector<NodeId> kick(Rng& rng) {
    if (n_ < 8) {
      std::uniform_int_distribution<int> pick(0, n_ - 1);
      const int i = pick(rng);
      const int j = (i + 1 + std::uniform_int_distribution<int>(1, n_ - 3)(rng)) % n_;
      const NodeId a = tour_[static_cast<std::size_t>(i)];
      const NodeId b = tour_[static_cast<std::size_t>(j)];
      const NodeId pa = pred(a), sb = succ(b);
      length_ += d(pa, b) + d(a, sb) - d(pa, a) - d(b, sb);
      reverse(i, j);
      return {a, b, pa, sb};
    }
    std::uniform_int_distribution<int> cut(1, n_ - 1);
    int p[3];
    do {
      p[0] = cut(rng);
      p[1] = cut(rng);
      p[2] = cut(rng);
      std::sort(p, p + 3);
    } while (p[0] == p[1] || p[1] == p[2]);
    std::vector<NodeId> next;
    next.reserve(static_cast<std::size_t>(n_));
    auto append = [&](int from, int to) {
      for (int i = from; i < to; ++i) next.push_back(tour_[static_cast<std::size_t>(i)]);
    };
    append(0, p[0]);
    append(p[1], p[2]);
    append(p[0], p[1]);
    append(p[2], n_);
    std::vector<NodeId> touched = {
        tour_[static_cast<std::size_t>(p[0] - 1)], tour_[static_cast<std::size_t>(p[0])],
        tour_[static_cast<std::size_t>(p[1] - 1)], tour_[static_cast<std::size_t>(p[1])],
        tour_[static_cast<std::size_t>(p[2] - 1)], tour_[static_cast<std::size_t>(p[2])],
        tour_[0], tour_[static_cast<std::size_t>(n_ - 1)]};
    load(next);
    return touched;
  }

  bool has_improving_move() {
    return find_two_opt_exhaustive(false) || find_or_opt_exhaustive(false);
  }

 private:
  double d(NodeId a, NodeId b) const { return dist_(a, b); }
  NodeId at(int i) const { return tour_[static_cast<std::size_t>(((i % n_) + n_) % n_)]; }
  int position(NodeId v) const { return pos_[static_cast<std::size_t>(v)]; }
  NodeId succ(NodeId v) const { return at(position(v) + 1); }
  NodeId pred(NodeId v) const { return at(position(v) - 1); }

  static bool improves(double delta, double scale) { return delta < -1e-12 * std::max(scale, 1e-300); }

  void push(NodeId v) {
    if (!queued_[static_cast<std::size_t>(v)]) {
      queued_[static_cast<std::size_t>(v)] = 1;
      queue_.push_back(v);
    }
  }

  void set(int i, NodeId v) {
    tour_[static_cast<std::size_t>(i)] = v;
    pos_[static_cast<std::size_t>(v)] = i;
  }

  // Reverses tour positions i..j (inclusive, walking forward, cyclic). The
  // shorter of the segment and its complement is reversed; both give the
  // same cycle.
  void reverse(int i, int j) {
    int len = ((j - i) % n_ + n_) % n_ + 1;
    if (2 * len > n_) {
      const int ni = (j + 1) % n_;
      const int nj = (i - 1 + n_) % n_;
      i = ni;
      j = nj;
      len = n_ - len;
    }
    for (int k = 0; k < len / 2; ++k) {
      const int a = (i + k) % n_;
      const int b = ((j - k) % n_ + n_) % n_;
      const NodeId va = tour_[static_cast<std::size_t>(a)];
      const NodeId vb = tour_[static_cast<std::size_t>(b)];
      set(a, vb);
      set(b, va);
    }
  }

  void apply(double delta) {
    // Moves are only applied when they strictly shorten the tour.
    if (!(delta < 0.0)) throw Error(ErrorCode::kInvalidInput, "non-improving move applied");
    length_ += delta;
  }

  // Edges (a, succ a) and (c, succ c) become (a, c) and (succ a, succ c).
  void two_opt_succ(NodeId a, NodeId c, double delta) {
    apply(delta);
    reverse(position(succ(a)), position(c));
  }

  // Edges (pred a, a) and (pred c, c) become (a, c) and (pred a, pred c).
  void two_opt_pred(NodeId a, NodeId c, double delta) {
    apply(delta);
    reverse(position(a), position(pred(c)));
  }

  bool try_two_opt(NodeId a) {
    for (int dir = 0; dir < 2; ++dir) {
      const NodeId b = dir == 0 ? succ(a) : pred(a);
      const double dab = d(a, b);
      for (NodeId c : neighbors_[static_cast<std::size_t>(a)]) {
        const double dac = d(a, c);
        if (dac >= dab) break;
        const NodeId e = dir == 0 ? succ(c) : pred(c);
        if (c == b || e == a) continue;
        const double delta = dac + d(b, e) - dab - d(c, e);
        if (improves(delta, dab + d(c, e))) {
          if (dir == 0) {
            two_opt_succ(a, c, delta);
          } else {
            two_opt_pred(a, c, delta);
          }
          push(a);
          push(b);
          push(c);
          push(e);
          return true;
        }
      }
    }
    return false;
  }

  // Segment given by its first and last node walking forward.
  struct Segment {
    NodeId first, last;
    int len;
  };

  bool in_segment(NodeId v, const Segment& s) const {
    const int off = ((position(v) - position(s.first)) % n_ + n_) % n_;
    return off < s.len;
  }

  // Moves `s` between u and w = succ(u), choosing the cheaper orientation.
  void move_segment(const Segment& s, NodeId u, bool reversed, double delta) {
    apply(delta);
    std::vector<NodeId> seg;
    seg.reserve(static_cast<std::size_t>(s.len));
    for (int k = 0; k < s.len; ++k) seg.push_back(at(position(s.first) + k));
    if (reversed) std::reverse(seg.begin(), seg.end());
    // The nodes outside the segment, in tour order starting after it.
    std::vector<NodeId> next;
    next.reserve(static_cast<std::size_t>(n_));
    const int after = position(s.last) + 1;
    for (int k = 0; k < n_ - s.len; ++k) {
      const NodeId v = at(after + k);
      next.push_back(v);
      if (v == u) next.insert(next.end(), seg.begin(), seg.end());
    }
    const double len = length_;
    load(next);
    length_ = len;
  }

  // Or-opt cost of moving segment s between u and succ(u).
  bool try_insert(const Segment& s, double remove_gain, NodeId u) {
    if (in_segment(u, s)) return false;
    const NodeId w = succ(u);
    if (in_segment(w, s)) return false;
    const double base = d(u, w);
    const double fwd = d(u, s.first) + d(s.last, w) - base;
    const double rev = d(u, s.last) + d(s.first, w) - base;
    const bool reversed = rev < fwd;
    const double delta = (reversed ? rev : fwd) - remove_gain;
    if (improves(delta, remove_gain + base)) {
      const NodeId p = pred(s.first), nx = succ(s.last);
      move_segment(s, u, reversed, delta);
      for (NodeId v : {p, nx, u, w, s.first, s.last}) push(v);
      return true;
    }
    return false;
  }

  double removal_gain(const Segment& s) const {
    const NodeId p = pred(s.first), nx = succ(s.last);
    return d(p, s.first) + d(s.last, nx) - d(p, nx);
  }

  bool try_or_opt(NodeId a) {
    for (int len = 1; len <= 3 && len + 3 <= n_; ++len) {
      for (int anchor = 0; anchor < 2; ++anchor) {
        // Segment starting at a, or ending at a.
        const int start = anchor == 0 ? position(a) : position(a) - len + 1;
        const Segment s{at(start), at(start + len - 1), len};
        const double gain = removal_gain(s);
        if (!(gain > 0.0)) continue;
        for (NodeId end : {s.first, s.last}) {
          for (NodeId c : neighbors_[static_cast<std::size_t>(end)]) {
            if (d(end, c) >= gain) break;
            if (try_insert(s, gain, c) || try_insert(s, gain, pred(c))) return true;
          }
        }
      }
    }
    return false;
  }

  void run_queue() {
    while (!queue_.empty()) {
      const NodeId a = queue_.front();
      queue_.pop_front();
      queued_[static_cast<std::size_t>(a)] = 0;
      if (try_two_opt(a) || try_or_opt(a)) push(a);
    }
  }

  bool find_two_opt_exhaustive(bool apply_move) {
    for (int i = 0; i < n_; ++i) {
      const NodeId a = at(i), b = at(i + 1);
      const double dab = d(a, b);
      for (int j = i + 2; j < n_; ++j) {
        const NodeId c = at(j), e = at(j + 1);
        if (e == a) continue;
        const double delta = d(a, c) + d(b, e) - dab - d(c, e);
        if (improves(delta, dab + d(c, e))) {
          if (apply_move) {
            two_opt_succ(a, c, delta);
            for (NodeId v : {a, b, c, e}) push(v);
          }
          return true;
        }
      }
    }
    return false;
  }

  bool find_or_opt_exhaustive(bool apply_move) {
    for (int len = 1; len <= 3 && len + 3 <= n_; ++len) {
      for (int i = 0; i < n_; ++i) {
        const Segment s{at(i), at(i + len - 1), len};
        const double gain = removal_gain(s);
        if (!(gain > 0.0)) continue;
        for (int j = 0; j < n_; ++j) {
          const NodeId u = at(j);
          if (in_segment(u, s) || in_segment(succ(u), s)) continue;
          const NodeId w = succ(u);
          const double base = d(u, w);
          const double fwd = d(u, s.first) + d(s.last, w) - base;
          const double rev = d(u, s.last) + d(s.first, w) - base;
          const double delta = std::min(fwd, rev) - gain;
          if (improves(delta, gain + base)) {
            if (apply_move) {
              const NodeId p = pred(s.first), nx = succ(s.last);
              move_segment(s, u, rev < fwd, delta);
              for (NodeId v : {p, nx, u, w, s.first, s.last}) push(v);
            }
            return true;
          }
        }
      }
    }
    return false;
  }

  const DistanceMatrix& dist_;
  int n_;
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<NodeId> tour_;
  std::vector<int> pos_;
  std::deque<NodeId> queue_;
  std::vector<char> queued_;
  double length_ = 0.0;
};

}  // namespace

double improve_tour(const DistanceMatrix& dist, std::vector<NodeId>& order, int neighbor_k) {
  check_permutation(order, dist.size());
  TourImprover imp(dist, neighbor_k);
  imp.load(order);
  imp.activate_all();
  imp.optimize();
  order = imp.order();
  return tour_length(dist, order);
}

bool is_local_optimum(const DistanceMatrix& dist, std::span<const NodeId> order) {
  check_permutation(order, dist.size());
  if (dist.size() < 4) return true;
  TourImprover imp(dist, 1);
  imp.load(order);
  return !imp.has_improving_move();
}

Tour local_search_tour(const Instance& instance, const SolveConfig& cfg) {
  const int n = instance.size();
  if (cfg.restarts < 1) throw Error(ErrorCode::kInvalidConfig, "restarts must be at least 1");
  if (cfg.max_no_improve < 0) throw Error(ErrorCode::kInvalidConfig, "max_no_improve must be >= 0");
  const DistanceMatrix dist(instance);
  if (n < 4) return make_tour(instance, nn_order(dist, 0));

  TourImprover imp(dist, cfg.neighbor_k);
  std::vector<NodeId> best;
  double best_len = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    const NodeId start = r == 0 && cfg.start_node
                             ? *cfg.start_node
                             : std::uniform_int_distribution<NodeId>(0, n - 1)(rng);
    imp.load(nn_order(dist, start));
    imp.activate_all();
    imp.optimize();
    std::vector<NodeId> run_best = imp.order();
    double run_len = imp.length();

    for (int fails = 0; fails < cfg.max_no_improve;) {
      const auto touched = imp.kick(rng);
      imp.optimize_local(touched);
      if (imp.length() < run_len - 1e-12 * run_len) {
        run_best = imp.order();
        run_len = imp.length();
        fails = 0;
      } else {
        imp.load(run_best);
        ++fails;
      }
    }
    imp.load(run_best);
    imp.activate_all();
    imp.optimize();
    const double len = tour_length(dist, imp.order());
    if (len < best_len) {
      best_len = len;
      best = imp.order();
    }
  }
  return make_tour(instance, std::move(best));
}

Tour solve(const Instance& instance, const SolveConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::kNearestNeighbor: return nn_tour(instance, cfg.start_node.value_or(0));
    case Algorithm::kExactDp: return exact_tour(instance);
    case Algorithm::kLocalSearch: return local_search_tour(instance, cfg);
  }
  return local_search_tour(instance, cfg);
}

std::vector<SolveOutcome> solve_batch(std::span<const Instance> instances, const SolveConfig& cfg,
                                      int jobs) {
  std::vector<SolveOutcome> out(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    SolveConfig item = cfg;
    item.seed = sub_seed(cfg.seed, i);
    try {
      out[i].tour = solve(instances[i], item);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace nnd
