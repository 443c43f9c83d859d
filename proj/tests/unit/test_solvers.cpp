#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "nnd/error.hpp"
#include "nnd/generators.hpp"
#include "nnd/rng.hpp"
#include "nnd/solvers.hpp"
#include "nnd/tsplib_io.hpp"

using namespace nnd;

namespace {

// Fixes node 0 first and enumerates the rest.
double brute_force_length(const Instance& inst) {
  std::vector<NodeId> perm(static_cast<std::size_t>(inst.size()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, tour_length(inst, perm));
  } while (std::next_permutation(perm.begin() + 1, perm.end()));
  return best;
}

}  // namespace

TEST_CASE("algorithm names") {
  CHECK(parse_algorithm("nn") == Algorithm::kNearestNeighbor);
  CHECK(parse_algorithm("exact") == Algorithm::kExactDp);
  CHECK(parse_algorithm("ls") == Algorithm::kLocalSearch);
  CHECK_THROWS_AS(parse_algorithm("concorde"), Error);
}

TEST_CASE("nearest neighbour tours") {
  const Instance tri("tri", {{0, 0}, {3, 0}, {0, 4}});
  CHECK(nn_tour(tri).length == doctest::Approx(12.0));

  const Instance line("line", {{0, 0}, {1, 0}, {2, 0}, {4, 0}});
  CHECK(nn_tour(line, 0).order == std::vector<NodeId>{0, 1, 2, 3});

  // Equidistant candidates: lowest index wins.
  const Instance tie("tie", {{0, 0}, {1, 0}, {-1, 0}, {0, 5}});
  CHECK(nn_tour(tie, 0).order[1] == 1);
  CHECK(nn_tour(tie, 3).order[0] == 3);
}

TEST_CASE("exact solver matches permutation search") {
  const Instance sq = test::unit_square();
  CHECK(exact_tour(sq).length == 4.0);
  for (int n = 3; n <= 8; ++n) {
    for (std::uint64_t s = 0; s < 15; ++s) {
      const Instance inst = test::random_instance(n, sub_seed(static_cast<std::uint64_t>(n), s));
      const Tour t = exact_tour(inst);
      CHECK(t.length == doctest::Approx(brute_force_length(inst)).epsilon(1e-12));
      CHECK(canonical_order(t.order) == t.order);
    }
  }
}

TEST_CASE("exact solver dominates nearest neighbour") {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const int n = 4 + static_cast<int>(s % 9);
    const Instance inst = test::random_instance(n, sub_seed(321, s));
    REQUIRE(exact_tour(inst).length <= nn_tour(inst).length + 1e-12);
  }
}

TEST_CASE("exact solver size guard") {
  const Instance big = test::random_instance(25, 1);
  try {
    exact_tour(big);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSizeLimit);
  }
}

TEST_CASE("local search matches exact on small instances") {
  SolveConfig cfg;
  cfg.restarts = 20;
  int matches = 0;
  const int total = 500;
  for (int s = 0; s < total; ++s) {
    const int n = 5 + s % 8;
    const Instance inst = test::random_instance(n, sub_seed(555, static_cast<std::uint64_t>(s)));
    cfg.seed = static_cast<std::uint64_t>(s);
    const Tour ls = local_search_tour(inst, cfg);
    const Tour ex = exact_tour(inst);
    REQUIRE(ls.length >= ex.length - 1e-9);
    if (ls.length <= ex.length + 1e-9) ++matches;
  }
  CHECK(matches >= 495);
}

TEST_CASE("local search reaches the eil51 optimum") {
  const Instance eil = load_instance(test::data_dir() / "tsplib" / "eil51.tsp");
  SolveConfig cfg;
  cfg.restarts = 50;
  cfg.seed = 1;
  const Tour t = local_search_tour(eil, cfg);
  CHECK(t.length == 426.0);
}

TEST_CASE("comb tour is a local optimum and returned by local search") {
  for (int n = 10; n <= 80; n += 2) {
    ParallelConfig cfg;
    cfg.n = n;
    cfg.rotate = false;
    cfg.rescale = false;
    const Instance inst = gen_parallel_perturbed(cfg, 1);
    const DistanceMatrix dist(inst);
    const auto comb = test::comb_order(n);
    CHECK(is_local_optimum(dist, comb));
    SolveConfig sc;
    sc.seed = static_cast<std::uint64_t>(n);
    const Tour t = local_search_tour(inst, sc);
    CHECK(t.length == doctest::Approx(tour_length(inst, comb)).epsilon(1e-12));
    if (n <= 20) CHECK(exact_tour(inst).length == doctest::Approx(tour_length(inst, comb)));
  }
}

TEST_CASE("improve_tour reaches a local optimum and never lengthens") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Instance inst = test::random_instance(60, s);
    const DistanceMatrix dist(inst);
    std::vector<NodeId> order(60);
    std::iota(order.begin(), order.end(), 0);
    const double before = tour_length(dist, order);
    const double after = improve_tour(dist, order, 8);
    CHECK(after <= before);
    CHECK(after == doctest::Approx(tour_length(dist, order)).epsilon(1e-12));
    CHECK(is_local_optimum(dist, order));
  }
}

TEST_CASE("local search is deterministic in the seed") {
  const Instance inst = test::random_instance(80, 4);
  SolveConfig cfg;
  cfg.seed = 9;
  const Tour a = local_search_tour(inst, cfg);
  const Tour b = local_search_tour(inst, cfg);
  CHECK(a.order == b.order);
  CHECK(is_local_optimum(DistanceMatrix(inst), a.order));
}

TEST_CASE("batch solving") {
  GeneratorConfig gc;
  gc.family = RueConfig{20};
  gc.master_seed = 10;
  const auto inst = gen_batch(gc, 40);
  SolveConfig cfg;
  cfg.algorithm = Algorithm::kExactDp;
  const auto one = solve_batch(inst, cfg, 1);
  const auto three = solve_batch(inst, cfg, 3);
  REQUIRE(one.size() == 40);
  for (std::size_t i = 0; i < one.size(); ++i) {
    REQUIRE(one[i].ok());
    CHECK(one[i].tour->order == three[i].tour->order);
  }
  // On the square the boundary adds about 20% at n = 20; the torus has no
  // boundary, so the band applies there.
  std::vector<Instance> torus;
  for (std::uint64_t i = 0; i < 40; ++i) {
    torus.emplace_back("t", test::random_points(20, sub_seed(10, i)), Metric::kTorus);
  }
  double mean = 0.0;
  for (const auto& o : solve_batch(torus, cfg)) mean += o.tour->length / 40.0;
  CHECK(std::fabs(mean / (0.7124 * std::sqrt(20.0)) - 1.0) < 0.15);

  cfg.algorithm = Algorithm::kLocalSearch;
  cfg.seed = 3;
  const auto ls1 = solve_batch(std::span(inst).first(8), cfg, 1);
  const auto ls4 = solve_batch(std::span(inst).first(8), cfg, 4);
  for (std::size_t i = 0; i < ls1.size(); ++i) CHECK(ls1[i].tour->order == ls4[i].tour->order);
}

TEST_CASE("batch failures stay per item") {
  std::vector<Instance> inst{test::random_instance(10, 1), test::random_instance(30, 2),
                             test::random_instance(9, 3)};
  SolveConfig cfg;
  cfg.algorithm = Algorithm::kExactDp;
  const auto out = solve_batch(inst, cfg);
  REQUIRE(out.size() == 3);
  CHECK(out[0].ok());
  CHECK_FALSE(out[1].ok());
  CHECK_FALSE(out[1].error.empty());
  CHECK(out[2].ok());
}
