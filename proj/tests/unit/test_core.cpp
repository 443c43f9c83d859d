#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "nnd/core.hpp"
#include "nnd/error.hpp"
#include "nnd/tsplib_io.hpp"

using namespace nnd;

TEST_CASE("distance examples") {
  CHECK(distance({0, 0}, {3, 4}, Metric::kExact) == 5.0);
  CHECK(distance({0, 0}, {1.4, 0}, Metric::kTsplib) == 1.0);
  CHECK(distance({0, 0}, {1.5, 0}, Metric::kTsplib) == 2.0);
  CHECK(distance({0.05, 0.5}, {0.95, 0.5}, Metric::kTorus) == doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("distance rejects bad coordinates") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(distance({nan, 0}, {0, 0}, Metric::kExact), Error);
  CHECK_THROWS_AS(distance({0, 0}, {inf, 0}, Metric::kTsplib), Error);
  try {
    distance({1.5, 0}, {0, 0}, Metric::kTorus);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
  }
}

TEST_CASE("distance symmetry and triangle inequality on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Metric metric : {Metric::kExact, Metric::kTorus}) {
    for (int t = 0; t < 100000; ++t) {
      const Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
      const double ab = metric_distance(a, b, metric);
      const double ba = metric_distance(b, a, metric);
      const double bc = metric_distance(b, c, metric);
      const double ac = metric_distance(a, c, metric);
      REQUIRE(ab == ba);
      REQUIRE(ab >= 0.0);
      REQUIRE(ac <= ab + bc + 1e-12);
    }
  }
  CHECK(distance({0.3, 0.3}, {0.3, 0.3}, Metric::kExact) == 0.0);
}

TEST_CASE("tsplib rounding matches nint on fixture pairs") {
  const Instance inst = load_instance(test::data_dir() / "tsplib" / "eil51.tsp");
  for (int i = 0; i < inst.size(); ++i) {
    for (int j = 0; j < inst.size(); ++j) {
      const auto& a = inst.nodes[static_cast<std::size_t>(i)];
      const auto& b = inst.nodes[static_cast<std::size_t>(j)];
      const double exact = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
      REQUIRE(distance(a, b, Metric::kTsplib) == static_cast<double>(std::lround(exact)));
    }
  }
}

TEST_CASE("metric names") {
  CHECK(parse_metric("exact") == Metric::kExact);
  CHECK(parse_metric("tsplib") == Metric::kTsplib);
  CHECK(parse_metric("EUC_2D") == Metric::kTsplib);
  CHECK(parse_metric("torus") == Metric::kTorus);
  CHECK_THROWS_AS(parse_metric("manhattan"), Error);
  CHECK(to_string(Metric::kTorus) == "torus");
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(Instance("x", {{0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(Instance("x", {{0, 0}, {1, 1}, {std::nan(""), 0}}), Error);
  CHECK_THROWS_AS(Instance("x", {{0, 0}, {1, 1}, {1.2, 0}}, Metric::kTorus), Error);
  // Duplicates are legal.
  CHECK_NOTHROW(Instance("x", {{0, 0}, {0, 0}, {1, 1}}));
}

TEST_CASE("tour length examples") {
  const Instance sq = test::unit_square();
  const std::vector<NodeId> order{0, 1, 2, 3};
  CHECK(tour_length(sq, order) == 4.0);

  const Instance tri("tri", {{0, 0}, {3, 0}, {0, 4}});
  std::vector<NodeId> perm{0, 1, 2};
  do {
    CHECK(tour_length(tri, perm) == doctest::Approx(12.0));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("tour length equals independent re-summation") {
  const Instance inst = test::random_instance(7, 11);
  const std::vector<NodeId> order{3, 0, 6, 2, 5, 1, 4};
  double oracle = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Point a = inst.nodes[static_cast<std::size_t>(order[i])];
    const Point b = inst.nodes[static_cast<std::size_t>(order[(i + 1) % order.size()])];
    oracle += std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
  }
  CHECK(tour_length(inst, order) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("tour length is exactly invariant under rotation and reversal") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance inst = test::random_instance(40, seed);
    std::vector<NodeId> order(40);
    for (int i = 0; i < 40; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
    const double base = tour_length(inst, order);
    for (int r = 0; r < 40; ++r) {
      std::vector<NodeId> rotated = order;
      std::rotate(rotated.begin(), rotated.begin() + r, rotated.end());
      REQUIRE(tour_length(inst, rotated) == base);
      std::reverse(rotated.begin(), rotated.end());
      REQUIRE(tour_length(inst, rotated) == base);
    }
  }
}

TEST_CASE("tour length rejects non-permutations") {
  const Instance sq = test::unit_square();
  for (const std::vector<NodeId>& bad :
       {std::vector<NodeId>{0, 1, 2}, {0, 1, 1, 2}, {0, 1, 2, 4}, {-1, 0, 1, 2}}) {
    try {
      tour_length(sq, bad);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidTour);
    }
  }
}

TEST_CASE("canonical order") {
  const std::vector<NodeId> a{2, 3, 0, 1};
  const std::vector<NodeId> b{1, 0, 3, 2};
  CHECK(canonical_order(a) == std::vector<NodeId>{0, 1, 2, 3});
  CHECK(canonical_order(b) == std::vector<NodeId>{0, 1, 2, 3});
}

TEST_CASE("make_tour caches the length") {
  const Instance sq = test::unit_square();
  const Tour t = make_tour(sq, {0, 2, 1, 3});
  CHECK(t.length == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(make_tour(sq, {0, 0, 1, 2}), Error);
}

TEST_CASE("tour neighbours") {
  const std::vector<NodeId> order{2, 0, 3, 1};
  const auto nb = tour_neighbors(order);
  CHECK(nb[0] == std::pair<NodeId, NodeId>{2, 3});
  CHECK(nb[2] == std::pair<NodeId, NodeId>{1, 0});
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("optimality gap") {
  CHECK(optimality_gap(5.928, 5.688) == doctest::Approx(0.04219).epsilon(1e-4));
  CHECK(optimality_gap(3.5, 3.5) == 0.0);
  CHECK(optimality_gap(7.0, 3.5) == 1.0);
  CHECK_THROWS_AS(optimality_gap(1.0, 0.0), Error);
  CHECK_THROWS_AS(optimality_gap(1.0, -2.0), Error);

  test::WarningCapture warnings;
  CHECK(optimality_gap(0.9, 1.0) == doctest::Approx(-0.1));
  CHECK(warnings.taken().size() == 1);
  CHECK(optimality_gap(1.0 - 1e-12, 1.0) <= 0.0);
  CHECK(warnings.taken().size() == 1);
}

TEST_CASE("gap summary reports both conventions") {
  const std::vector<double> cand{1.1, 3.0};
  const std::vector<double> ref{1.0, 2.0};
  const GapSummary s = summarize_gaps(cand, ref);
  CHECK(s.count == 2);
  CHECK(s.mean_of_gaps == doctest::Approx((0.1 + 0.5) / 2.0));
  CHECK(s.ratio_of_mean_lengths == doctest::Approx(4.1 / 3.0 - 1.0));
  CHECK_THROWS_AS(summarize_gaps(cand, std::vector<double>{1.0}), Error);
}
