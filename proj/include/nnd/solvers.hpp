#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nnd/core.hpp"

namespace nnd {

enum class Algorithm { kNearestNeighbor, kExactDp, kLocalSearch };

std::string_view to_string(Algorithm algo);
// "nn", "exact", "ls" (long forms accepted).
Algorithm parse_algorithm(std::string_view text);

// Held-Karp keeps n * 2^(n-1) partial costs; beyond this it stops being a
// desk-scale computation.
inline constexpr int kExactMaxNodes = 24;

struct SolveConfig {
  Algorithm algorithm = Algorithm::kLocalSearch;
  std::optional<NodeId> start_node;
  // Independent local-search runs; the best tour wins.
  int restarts = 8;
  // Each run perturbs its local optimum (double bridge) and re-optimizes
  // until this many consecutive perturbations fail to improve it.
  int max_no_improve = 30;
  std::uint64_t seed = 0;
  // Candidate-list size for the pruned move evaluation.
  int neighbor_k = 16;
};

// Greedy tour from `start`; ties go to the lowest node index.
Tour nn_tour(const Instance& instance, NodeId start = 0);
std::vector<NodeId> nn_order(const DistanceMatrix& dist, NodeId start);

// Held-Karp dynamic program. Returns a minimum-length tour in canonical
// orientation (see canonical_order). Throws Error(kSizeLimit) for n > 24.
Tour exact_tour(const Instance& instance);

// Multi-restart 2-opt + Or-opt (segments of 1..3) with perturbation. Runs
// are deterministic in (cfg.seed, restart index). The final pass evaluates
// every move without candidate pruning, so the result is a true 2-opt and
// Or-opt local optimum.
Tour local_search_tour(const Instance& instance, const SolveConfig& cfg);

// Improves `order` in place to a 2-opt/Or-opt local optimum (no restarts, no
// perturbation). Returns the final length.
double improve_tour(const DistanceMatrix& dist, std::vector<NodeId>& order, int neighbor_k = 16);

// True if no improving 2-opt or Or-opt move exists (exhaustive check).
bool is_local_optimum(const DistanceMatrix& dist, std::span<const NodeId> order);

Tour solve(const Instance& instance, const SolveConfig& cfg);

struct SolveOutcome {
  std::optional<Tour> tour;
  std::string error;  // empty on success

  bool ok() const noexcept { return tour.has_value(); }
};

// Instance i is solved with seed sub_seed(cfg.seed, i). Failures are
// recorded per item; the batch itself never throws for a single bad item.
std::vector<SolveOutcome> solve_batch(std::span<const Instance> instances, const SolveConfig& cfg,
                                      int jobs = 1);

}  // namespace nnd
