#include "nnd/generators.hpp"

#include <cstdio>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nnd/error.hpp"
#include "nnd/parallel.hpp"
#include "nnd/rng.hpp"

namespace nnd {

namespace {

// Stage streams derived from one instance seed.
enum Stream : std::uint64_t { kGraph = 1, kLayout = 2, kSweep = 3 };

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

Provenance make_provenance(const FamilyConfig& family, std::uint64_t seed) {
  return Provenance{GeneratorConfig{family, seed}, seed, 0};
}

std::string default_name(const FamilyConfig& family, std::uint64_t seed) {
  return std::string(family_name(family)) + "-n" + std::to_string(family_size(family)) + "-s" +
         std::to_string(seed);
}

// Translate to the origin and divide by the larger side, so the point set
// fits [0,1]^2 without changing its shape.
double rescale_unit_square(std::vector<Point>& pts) {
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span = std::max(max_x - min_x, max_y - min_y);
  const double scale = span > 0.0 ? 1.0 / span : 1.0;
  for (auto& p : pts) {
    p.x = std::clamp((p.x - min_x) * scale, 0.0, 1.0);
    p.y = std::clamp((p.y - min_y) * scale, 0.0, 1.0);
  }
  return scale;
}

}  // namespace

std::string instance_name(const FamilyConfig& family, std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05llu", static_cast<unsigned long long>(index));
  return std::string(family_name(family)) + "-n" + std::to_string(family_size(family)) + "-" +
         buf;
}

Instance gen_rue(int n, std::uint64_t seed) {
  const FamilyConfig family = RueConfig{n};
  validate(family);
  Rng rng(seed);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  return Instance(default_name(family, seed), std::move(pts), Metric::kExact,
                  make_provenance(family, seed));
}

Instance gen_rne(int n, std::uint64_t seed, double mean, double sd) {
  const FamilyConfig family = RneConfig{n, mean, sd};
  validate(family);
  Rng rng(seed);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = mean + sd * standard_normal(rng);
    p.y = mean + sd * standard_normal(rng);
  }
  return Instance(default_name(family, seed), std::move(pts), Metric::kExact,
                  make_provenance(family, seed));
}

DegreeGraph ba_graph(int n, int m0, int m, std::uint64_t seed) {
  if (!(m >= 1 && m <= m0 && m0 < n)) {
    throw Error(ErrorCode::kInvalidConfig,
                "ba_graph requires 1 <= m <= m0 < n (got n=" + std::to_string(n) +
                    ", m0=" + std::to_string(m0) + ", m=" + std::to_string(m) + ")");
  }
  DegreeGraph g;
  g.n = n;
  g.degrees.assign(static_cast<std::size_t>(n), 0);
  // Every edge endpoint appears once, so a uniform draw is degree-proportional.
  std::vector<int> endpoints;
  endpoints.reserve(static_cast<std::size_t>(2 * (m0 + m * (n - m0))));
  auto add_edge = [&](int u, int v) {
    g.edges.emplace_back(u, v);
    ++g.degrees[static_cast<std::size_t>(u)];
    ++g.degrees[static_cast<std::size_t>(v)];
    endpoints.push_back(u);
    endpoints.push_back(v);
  };
  for (int i = 0; i + 1 < m0; ++i) add_edge(i, i + 1);

  Rng rng(seed);
  std::vector<int> targets;
  for (int v = m0; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      int u;
      if (endpoints.empty()) {
        // Single-node seed network: nothing has degree yet.
        u = std::uniform_int_distribution<int>(0, v - 1)(rng);
      } else {
        const auto idx = std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng);
        u = endpoints[idx];
      }
      if (std::find(targets.begin(), targets.end(), u) == targets.end()) targets.push_back(u);
    }
    // Endpoints join the sampling pool only after v has chosen all targets.
    for (int u : targets) add_edge(v, u);
  }
  return g;
}

SquareMatrix degrees_to_distances(const DegreeGraph& graph, double k_attract) {
  if (!(k_attract > 0.0)) throw Error(ErrorCode::kInvalidConfig, "k must be positive");
  SquareMatrix d(graph.n);
  for (int u = 0; u < graph.n; ++u) {
    for (int v = u + 1; v < graph.n; ++v) {
      const double deg = graph.degrees[static_cast<std::size_t>(u)] +
                         graph.degrees[static_cast<std::size_t>(v)];
      const double value = std::exp(-k_attract * deg);
      d(u, v) = value;
      d(v, u) = value;
    }
  }
  return d;
}

double layout_stress(const SquareMatrix& targets, std::span<const Point> points) {
  const int n = targets.n;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) / 2);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double d = targets(u, v);
      const double r = euclidean(points[static_cast<std::size_t>(u)],
                                 points[static_cast<std::size_t>(v)]) - d;
      terms.push_back(r * r / (d * d));
    }
  }
  return pairwise_sum(terms);
}

LayoutResult spring_layout(const SquareMatrix& targets, int iterations, double tolerance,
                           std::uint64_t seed) {
  const int n = targets.n;
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "empty target matrix");
  double max_target = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const double d = targets(u, v);
      if (!(d > 0.0) || !std::isfinite(d) || d != targets(v, u)) {
        throw Error(ErrorCode::kInvalidInput, "targets must be symmetric and positive");
      }
      max_target = std::max(max_target, d);
    }
  }

  Rng rng(seed);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  const double side = n > 1 ? max_target : 1.0;
  for (auto& p : pts) {
    p.x = side * uniform01(rng);
    p.y = side * uniform01(rng);
  }

  LayoutResult result;
  result.initial_stress = n > 1 ? layout_stress(targets, pts) : 0.0;
  double stress = result.initial_stress;

  for (int it = 0; it < iterations && n > 1; ++it) {
    for (int i = 0; i < n; ++i) {
      const Point xi = pts[static_cast<std::size_t>(i)];
      double num_x = 0.0, num_y = 0.0, den = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const Point xj = pts[static_cast<std::size_t>(j)];
        const double d = targets(i, j);
        const double w = 1.0 / (d * d);
        const double dist = euclidean(xi, xj);
        double ux = 0.0, uy = 0.0;
        if (dist > 0.0) {
          ux = (xi.x - xj.x) / dist;
          uy = (xi.y - xj.y) / dist;
        }
        num_x += w * (xj.x + d * ux);
        num_y += w * (xj.y + d * uy);
        den += w;
      }
      pts[static_cast<std::size_t>(i)] = {num_x / den, num_y / den};
    }
    result.iterations = it + 1;
    const double next = layout_stress(targets, pts);
    const double drop = stress - next;
    stress = next;
    if (stress == 0.0 || drop <= tolerance * std::max(stress + drop, 1e-300)) {
      result.converged = true;
      break;
    }
  }
  result.final_stress = stress;
  if (n == 1) {
    pts[0] = {0.0, 0.0};
    result.converged = true;
  } else {
    result.scale = rescale_unit_square(pts);
  }
  result.points = std::move(pts);
  return result;
}

LayoutResult force_layout(const SquareMatrix& weights, int iterations, double threshold,
                          std::uint64_t seed) {
  const int n = weights.n;
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "empty weight matrix");
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      const double w = weights(u, v);
      if (u != v && (!(w >= 0.0) || !std::isfinite(w) || w != weights(v, u))) {
        throw Error(ErrorCode::kInvalidInput, "weights must be symmetric and nonnegative");
      }
    }
  }

  Rng rng(seed);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = uniform01(rng);
    p.y = uniform01(rng);
  }
  LayoutResult result;
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double spacing = std::sqrt(1.0 / n);
  double temperature = 0.1 * std::max(max_x - min_x, max_y - min_y);
  const double cooling = temperature / (iterations + 1);

  std::vector<Point> step(static_cast<std::size_t>(n));
  for (int it = 0; it < iterations && n > 1; ++it) {
    for (int i = 0; i < n; ++i) {
      const Point pi = pts[static_cast<std::size_t>(i)];
      double fx = 0.0, fy = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const Point pj = pts[static_cast<std::size_t>(j)];
        const double dx = pi.x - pj.x;
        const double dy = pi.y - pj.y;
        const double dist = std::max(std::hypot(dx, dy), 0.01);
        const double f = spacing * spacing / (dist * dist) - weights(i, j) * dist / spacing;
        fx += dx * f;
        fy += dy * f;
      }
      double len = std::hypot(fx, fy);
      if (len < 0.01) len = 0.1;
      step[static_cast<std::size_t>(i)] = {fx * temperature / len, fy * temperature / len};
    }
    double moved2 = 0.0;
    for (int i = 0; i < n; ++i) {
      auto& p = pts[static_cast<std::size_t>(i)];
      const auto& s = step[static_cast<std::size_t>(i)];
      p.x += s.x;
      p.y += s.y;
      moved2 += s.x * s.x + s.y * s.y;
    }
    temperature -= cooling;
    result.iterations = it + 1;
    if (std::sqrt(moved2) / n < threshold) {
      result.converged = true;
      break;
    }
  }
  if (n == 1) {
    pts[0] = {0.0, 0.0};
    result.converged = true;
  } else {
    result.scale = rescale_unit_square(pts);
  }
  result.points = std::move(pts);
  return result;
}

Instance gen_scale_free(const ScaleFreeConfig& cfg, std::uint64_t seed) {
  const FamilyConfig family = cfg;
  validate(family);
  const auto graph = ba_graph(cfg.n, cfg.m0, cfg.m, stream_seed(seed, kGraph));
  const auto targets = degrees_to_distances(graph, cfg.k_attract);
  auto layout = cfg.layout == LayoutMethod::kForce
                    ? force_layout(targets, cfg.layout_iterations, cfg.layout_tolerance,
                                   stream_seed(seed, kLayout))
                    : spring_layout(targets, cfg.layout_iterations, cfg.layout_tolerance,
                                    stream_seed(seed, kLayout));
  return Instance(default_name(family, seed), std::move(layout.points), Metric::kExact,
                  make_provenance(family, seed));
}

Instance gen_parallel_perturbed(const ParallelConfig& cfg, std::uint64_t seed) {
  const FamilyConfig family = cfg;
  validate(family);
  const int rows = cfg.n / 2;
  std::vector<Point> pts(static_cast<std::size_t>(cfg.n));
  // Row A on y = x, row B on y = x + gap, both sampled at the same abscissae.
  for (int i = 0; i < rows; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(rows - 1);
    pts[static_cast<std::size_t>(i)] = {t, t};
    pts[static_cast<std::size_t>(rows + i)] = {t, t + cfg.line_gap};
  }

  Rng rng(seed);
  std::vector<int> order(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_large = static_cast<std::size_t>(std::floor(cfg.alpha * cfg.n));
  std::vector<char> large(static_cast<std::size_t>(cfg.n), 0);
  for (std::size_t i = 0; i < n_large; ++i) large[static_cast<std::size_t>(order[i])] = 1;
  for (int i = 0; i < cfg.n; ++i) {
    const double sigma = large[static_cast<std::size_t>(i)] ? cfg.sigma_large : cfg.sigma_small;
    const double zx = standard_normal(rng);
    const double zy = standard_normal(rng);
    pts[static_cast<std::size_t>(i)].x += sigma * zx;
    pts[static_cast<std::size_t>(i)].y += sigma * zy;
  }

  const double theta = std::numbers::pi * uniform01(rng);
  if (cfg.rotate) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) {
      cx += p.x;
      cy += p.y;
    }
    cx /= cfg.n;
    cy /= cfg.n;
    const double c = std::cos(theta), s = std::sin(theta);
    for (auto& p : pts) {
      const double dx = p.x - cx, dy = p.y - cy;
      p = {cx + c * dx - s * dy, cy + s * dx + c * dy};
    }
  }
  if (cfg.rescale) rescale_unit_square(pts);
  return Instance(default_name(family, seed), std::move(pts), Metric::kExact,
                  make_provenance(family, seed));
}

Instance gen_convolution(const ConvolutionConfig& cfg, std::uint64_t seed) {
  const FamilyConfig family = cfg;
  validate(family);
  Rng rng(seed);
  const double lambda = cfg.lambda_max * uniform01(rng);
  // Sigma = diag(s1, s2) holds variances drawn from U(0, lambda).
  const double sd_x = std::sqrt(lambda * uniform01(rng));
  const double sd_y = std::sqrt(lambda * uniform01(rng));
  std::vector<Point> pts(static_cast<std::size_t>(cfg.n));
  for (auto& p : pts) {
    const double ux = uniform01(rng);
    const double uy = uniform01(rng);
    p.x = ux + sd_x * standard_normal(rng);
    p.y = uy + sd_y * standard_normal(rng);
  }
  return Instance(default_name(family, seed), std::move(pts), Metric::kExact,
                  make_provenance(family, seed));
}

Instance generate(const FamilyConfig& family, std::uint64_t seed) {
  if (const auto* c = std::get_if<RueConfig>(&family)) return gen_rue(c->n, seed);
  if (const auto* c = std::get_if<RneConfig>(&family)) return gen_rne(c->n, seed, c->mean, c->sd);
  if (const auto* c = std::get_if<ScaleFreeConfig>(&family)) return gen_scale_free(*c, seed);
  if (const auto* c = std::get_if<ParallelConfig>(&family)) return gen_parallel_perturbed(*c, seed);
  return gen_convolution(std::get<ConvolutionConfig>(family), seed);
}

std::vector<Instance> gen_batch(const GeneratorConfig& cfg, std::size_t count, int jobs) {
  if (count < 1) throw Error(ErrorCode::kInvalidConfig, "batch count must be at least 1");
  validate(cfg.family);
  std::vector<Instance> out(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    const std::uint64_t seed = sub_seed(cfg.master_seed, i);
    Instance inst = generate(cfg.family, seed);
    inst.name = instance_name(cfg.family, i);
    inst.provenance = Provenance{cfg, seed, i};
    out[i] = std::move(inst);
  });
  return out;
}

ParallelConfig sweep_parallel_config(const ParallelConfig& base, std::uint64_t seed) {
  Rng rng(stream_seed(seed, kSweep));
  ParallelConfig c = base;
  c.alpha = uniform01(rng);
  c.sigma_small = std::pow(10.0, -4.0 + 3.0 * uniform01(rng));
  c.sigma_large = c.sigma_small * std::pow(10.0, 2.0 * uniform01(rng));
  return c;
}

std::vector<Instance> gen_parallel_sweep(const ParallelConfig& base, std::size_t count,
                                         std::uint64_t master_seed, int jobs) {
  if (count < 1) throw Error(ErrorCode::kInvalidConfig, "batch count must be at least 1");
  validate(FamilyConfig{base});
  std::vector<Instance> out(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    const std::uint64_t seed = sub_seed(master_seed, i);
    const ParallelConfig c = sweep_parallel_config(base, seed);
    Instance inst = gen_parallel_perturbed(c, seed);
    inst.name = instance_name(FamilyConfig{c}, i);
    inst.provenance = Provenance{GeneratorConfig{c, master_seed}, seed, i};
    out[i] = std::move(inst);
  });
  return out;
}

}  // namespace nnd
