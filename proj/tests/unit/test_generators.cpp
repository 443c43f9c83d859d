#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_set>
#include <vector>

#include "helpers.hpp"
#include "nnd/density.hpp"
#include "nnd/error.hpp"
#include "nnd/generators.hpp"
#include "nnd/rng.hpp"
#include "nnd/tsplib_io.hpp"

using namespace nnd;

namespace {

bool connected(const DegreeGraph& g) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n));
  for (auto [u, v] : g.edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        q.push(v);
      }
    }
  }
  return count == g.n;
}

bool in_unit_square(const Instance& inst) {
  return std::all_of(inst.nodes.begin(), inst.nodes.end(), [](const Point& p) {
    return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
  });
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST_CASE("rue range and determinism") {
  const Instance a = gen_rue(50, 42);
  CHECK(a.size() == 50);
  CHECK(in_unit_square(a));
  CHECK(gen_rue(50, 42).nodes == a.nodes);
  CHECK(gen_rue(50, 43).nodes != a.nodes);
}

TEST_CASE("rue pooled mean") {
  std::vector<double> xs, ys;
  for (std::uint64_t i = 0; i < 200; ++i) {
    for (const auto& p : gen_rue(50, sub_seed(5, i)).nodes) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  }
  CHECK(std::fabs(mean_of(xs) - 0.5) < 0.02);
  CHECK(std::fabs(mean_of(ys) - 0.5) < 0.02);
}

TEST_CASE("rne moments and degenerate limit") {
  const Instance tight = gen_rne(50, 7, 0.5, 1e-12);
  for (const auto& p : tight.nodes) {
    CHECK(p.x == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(0.5).epsilon(1e-9));
  }
  std::vector<double> xs, ys;
  for (std::uint64_t i = 0; i < 200; ++i) {
    for (const auto& p : gen_rne(50, sub_seed(9, i), 0.5, 0.2).nodes) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  }
  CHECK(std::fabs(sd_of(xs) / 0.2 - 1.0) < 0.05);
  CHECK(std::fabs(sd_of(ys) / 0.2 - 1.0) < 0.05);
  CHECK(gen_rne(30, 3, 0.5, 0.3).nodes == gen_rne(30, 3, 0.5, 0.3).nodes);
  CHECK_THROWS_AS(gen_rne(30, 3, 0.5, 0.0), Error);
}

TEST_CASE("ba graph small cases") {
  const DegreeGraph g = ba_graph(5, 2, 2, 17);
  CHECK(g.edges.size() == 1 + 2 * 3);
  CHECK(connected(g));
  CHECK(std::accumulate(g.degrees.begin(), g.degrees.end(), 0) ==
        static_cast<int>(2 * g.edges.size()));
  for (int v = 2; v < 5; ++v) CHECK(g.degrees[static_cast<std::size_t>(v)] >= 2);

  const DegreeGraph tree = ba_graph(4, 1, 1, 3);
  CHECK(tree.edges.size() == 3);
  CHECK(connected(tree));

  CHECK_THROWS_AS(ba_graph(5, 2, 3, 1), Error);
  CHECK_THROWS_AS(ba_graph(5, 5, 2, 1), Error);
  CHECK_THROWS_AS(ba_graph(5, 2, 0, 1), Error);
}

TEST_CASE("ba graph has no repeated edges and is heavy tailed") {
  const DegreeGraph g = ba_graph(2000, 3, 3, 2024);
  CHECK(connected(g));
  std::unordered_set<long long> keys;
  for (auto [u, v] : g.edges) {
    CHECK(u != v);
    const long long key = static_cast<long long>(std::min(u, v)) * 10000 + std::max(u, v);
    CHECK(keys.insert(key).second);
  }
  std::vector<int> deg = g.degrees;
  std::sort(deg.begin(), deg.end());
  CHECK(deg.back() > 10 * deg[deg.size() / 2]);
  CHECK(ba_graph(2000, 3, 3, 2024).edges == g.edges);
}

TEST_CASE("degree to distance mapping") {
  DegreeGraph g;
  g.n = 3;
  g.degrees = {1, 1, 3};
  const SquareMatrix d = degrees_to_distances(g, 0.5);
  CHECK(d(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(d(0, 1) == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(d(0, 2) < d(0, 1));
  CHECK(d(0, 2) == d(2, 0));
  CHECK(d(1, 1) == 0.0);
  const SquareMatrix flat = degrees_to_distances(g, 1e-12);
  CHECK(flat(0, 2) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stress layout examples") {
  SquareMatrix equal(3, 1.0);
  for (int i = 0; i < 3; ++i) equal(i, i) = 0.0;
  const LayoutResult tri = spring_layout(equal, 500, 1e-9, 1);
  const double d01 = euclidean(tri.points[0], tri.points[1]);
  const double d02 = euclidean(tri.points[0], tri.points[2]);
  const double d12 = euclidean(tri.points[1], tri.points[2]);
  CHECK(d01 / d02 == doctest::Approx(1.0).epsilon(0.01));
  CHECK(d12 / d02 == doctest::Approx(1.0).epsilon(0.01));

  SquareMatrix pair(2, 0.0);
  pair(0, 1) = pair(1, 0) = 0.3;
  const LayoutResult two = spring_layout(pair, 100, 1e-9, 2);
  CHECK(euclidean(two.points[0], two.points[1]) == doctest::Approx(0.3 * two.scale).epsilon(1e-6));

  const DegreeGraph g = ba_graph(40, 3, 2, 8);
  const SquareMatrix targets = degrees_to_distances(g, 0.5);
  const LayoutResult lr = spring_layout(targets, 200, 1e-6, 8);
  CHECK(lr.final_stress <= lr.initial_stress);
  CHECK(lr.iterations >= 1);
  for (const auto& p : lr.points) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= 1.0);
  }
  CHECK(spring_layout(targets, 200, 1e-6, 8).points == lr.points);
}

TEST_CASE("force layout examples") {
  SquareMatrix equal(3, 1.0);
  for (int i = 0; i < 3; ++i) equal(i, i) = 0.0;
  const LayoutResult tri = force_layout(equal, 200, 0.0, 4);
  const double d01 = euclidean(tri.points[0], tri.points[1]);
  const double d02 = euclidean(tri.points[0], tri.points[2]);
  const double d12 = euclidean(tri.points[1], tri.points[2]);
  CHECK(d01 / d02 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(d12 / d02 == doctest::Approx(1.0).epsilon(0.05));

  const DegreeGraph g = ba_graph(60, 3, 2, 5);
  const SquareMatrix w = degrees_to_distances(g, 0.5);
  const LayoutResult a = force_layout(w, 50, 1e-4, 5);
  CHECK(a.points.size() == 60);
  CHECK(force_layout(w, 50, 1e-4, 5).points == a.points);
}

TEST_CASE("scale-free instances are centre dense") {
  ScaleFreeConfig cfg;
  cfg.n = 100;
  int ordered = 0;
  const int trials = 10;
  for (int t = 0; t < trials; ++t) {
    const Instance inst = gen_scale_free(cfg, sub_seed(77, static_cast<std::uint64_t>(t)));
    REQUIRE(in_unit_square(inst));
    double cx = 0.0, cy = 0.0;
    for (const auto& p : inst.nodes) {
      cx += p.x;
      cy += p.y;
    }
    cx /= cfg.n;
    cy /= cfg.n;
    const NnDistanceStats st = nn_distance_samples(inst, 1);
    std::vector<std::pair<double, double>> by_radius;  // (radius, r1)
    for (int i = 0; i < cfg.n; ++i) {
      const auto& p = inst.nodes[static_cast<std::size_t>(i)];
      by_radius.emplace_back(std::hypot(p.x - cx, p.y - cy), st.r(i, 1));
    }
    std::sort(by_radius.begin(), by_radius.end());
    const int q = cfg.n / 4;
    double inner = 0.0, outer = 0.0;
    for (int i = 0; i < q; ++i) {
      inner += by_radius[static_cast<std::size_t>(i)].second;
      outer += by_radius[static_cast<std::size_t>(cfg.n - 1 - i)].second;
    }
    if (inner < outer) ++ordered;
  }
  CHECK(ordered == trials);
}

TEST_CASE("scale-free provenance and stress method") {
  ScaleFreeConfig cfg;
  cfg.n = 30;
  cfg.layout = LayoutMethod::kStress;
  cfg.layout_iterations = 300;
  cfg.layout_tolerance = 1e-6;
  const Instance inst = gen_scale_free(cfg, 4);
  CHECK(in_unit_square(inst));
  REQUIRE(inst.provenance.has_value());
  CHECK(std::get<ScaleFreeConfig>(inst.provenance->config.family).layout == LayoutMethod::kStress);
  CHECK(parse_layout_method("force") == LayoutMethod::kForce);
  CHECK_THROWS_AS(parse_layout_method("spring"), Error);
}

TEST_CASE("parallel lines without noise") {
  ParallelConfig cfg;
  cfg.n = 50;
  cfg.rotate = false;
  cfg.rescale = false;
  const Instance inst = gen_parallel_perturbed(cfg, 1);
  for (int i = 0; i < 25; ++i) {
    const auto& a = inst.nodes[static_cast<std::size_t>(i)];
    const auto& b = inst.nodes[static_cast<std::size_t>(25 + i)];
    CHECK(a.y - a.x == doctest::Approx(0.0));
    CHECK(b.y - b.x == doctest::Approx(0.05));
    CHECK(a.x == doctest::Approx(i / 24.0));
  }

  // Rotated and rescaled: points still lie on two parallel lines.
  cfg.rotate = true;
  cfg.rescale = true;
  const Instance rot = gen_parallel_perturbed(cfg, 99);
  CHECK(in_unit_square(rot));
  const Point p0 = rot.nodes[0], p1 = rot.nodes[24];
  const double ux = (p1.x - p0.x) / euclidean(p0, p1), uy = (p1.y - p0.y) / euclidean(p0, p1);
  const double offset_b = -uy * (rot.nodes[25].x - p0.x) + ux * (rot.nodes[25].y - p0.y);
  for (int i = 0; i < 50; ++i) {
    const auto& p = rot.nodes[static_cast<std::size_t>(i)];
    const double perp = -uy * (p.x - p0.x) + ux * (p.y - p0.y);
    CHECK(std::fabs(perp - (i < 25 ? 0.0 : offset_b)) < 1e-12);
  }

  cfg.n = 51;
  CHECK_THROWS_AS(gen_parallel_perturbed(cfg, 1), Error);
}

TEST_CASE("parallel noise changes the points") {
  ParallelConfig cfg;
  cfg.alpha = 0.3;
  cfg.sigma_small = 0.001;
  cfg.sigma_large = 0.05;
  const Instance a = gen_parallel_perturbed(cfg, 5);
  CHECK(in_unit_square(a));
  CHECK(gen_parallel_perturbed(cfg, 5).nodes == a.nodes);
  cfg.sigma_large = 0.0001;
  CHECK_THROWS_AS(gen_parallel_perturbed(cfg, 5), Error);
}

TEST_CASE("parallel sweep parameters stay in range") {
  ParallelConfig base;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const ParallelConfig c = sweep_parallel_config(base, s);
    REQUIRE(c.alpha >= 0.0);
    REQUIRE(c.alpha <= 1.0);
    REQUIRE(c.sigma_small >= 1e-4);
    REQUIRE(c.sigma_small <= 1e-1);
    REQUIRE(c.sigma_large >= c.sigma_small);
    REQUIRE(c.sigma_large <= 100.0 * c.sigma_small * (1.0 + 1e-12));
  }
  const auto batch = gen_parallel_sweep(base, 5, 3);
  REQUIRE(batch.size() == 5);
  const auto& cfg1 = std::get<ParallelConfig>(batch[1].provenance->config.family);
  CHECK(generate(cfg1, batch[1].provenance->seed).nodes == batch[1].nodes);
  CHECK(gen_parallel_sweep(base, 5, 3, 3)[4].nodes == batch[4].nodes);
}

TEST_CASE("convolution") {
  ConvolutionConfig cfg;
  cfg.n = 40;
  const Instance a = gen_convolution(cfg, 8);
  CHECK(a.size() == 40);
  CHECK(gen_convolution(cfg, 8).nodes == a.nodes);

  // Vanishing covariance leaves the uniform component.
  cfg.lambda_max = 1e-14;
  const Instance flat = gen_convolution(cfg, 8);
  CHECK(in_unit_square(flat));
  cfg.lambda_max = 0.0;
  CHECK_THROWS_AS(gen_convolution(cfg, 8), Error);
  cfg.lambda_max = 1.5;
  CHECK_THROWS_AS(gen_convolution(cfg, 8), Error);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate(FamilyConfig{RueConfig{2}}), Error);
  ParallelConfig p;
  p.alpha = 1.5;
  CHECK_THROWS_AS(validate(FamilyConfig{p}), Error);
  p.alpha = 0.5;
  p.line_gap = 1.0;
  CHECK_THROWS_AS(validate(FamilyConfig{p}), Error);
  ScaleFreeConfig s;
  s.k_attract = 0.0;
  CHECK_THROWS_AS(validate(FamilyConfig{s}), Error);
}

TEST_CASE("sub seeds never collide") {
  std::vector<std::uint64_t> seeds(1000000);
  for (std::uint64_t i = 0; i < seeds.size(); ++i) seeds[i] = sub_seed(12345, i);
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("batches") {
  GeneratorConfig cfg;
  cfg.family = RueConfig{50};
  cfg.master_seed = 6;
  const auto batch = gen_batch(cfg, 3);
  REQUIRE(batch.size() == 3);
  CHECK(batch[0].nodes != batch[1].nodes);
  CHECK(batch[1].nodes != batch[2].nodes);
  CHECK(batch[2].provenance->seed == sub_seed(6, 2));
  CHECK(batch[2].nodes == gen_rue(50, sub_seed(6, 2)).nodes);

  ScaleFreeConfig sf;
  sf.n = 25;
  cfg.family = sf;
  const auto one = gen_batch(cfg, 6, 1);
  const auto four = gen_batch(cfg, 6, 4);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(instance_to_json(one[i]).dump() == instance_to_json(four[i]).dump());
    CHECK(one[i].name == four[i].name);
  }
}
