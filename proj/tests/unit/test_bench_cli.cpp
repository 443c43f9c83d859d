#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "nnd/bench.hpp"
#include "nnd/cli.hpp"
#include "nnd/error.hpp"
#include "nnd/generators.hpp"
#include "nnd/rng.hpp"
#include "nnd/solvers.hpp"
#include "nnd/tsplib_io.hpp"

using namespace nnd;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args, const char* seed_env = nullptr) {
  args.insert(args.begin(), "nnd");
  std::ostringstream out, err;
  const EnvLookup env = [seed_env](const char* key) -> const char* {
    return std::string_view(key) == "NND_SEED" ? seed_env : nullptr;
  };
  const int code = run_cli(args, out, err, env);
  return {code, out.str(), err.str()};
}

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.generator.family = RueConfig{15};
  cfg.generator.master_seed = 77;
  cfg.count = 12;
  cfg.solver.algorithm = Algorithm::kLocalSearch;
  cfg.solver.restarts = 2;
  cfg.reference = Algorithm::kExactDp;
  cfg.histogram_bins = 5;
  return cfg;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("settings parser") {
  const Settings s = parse_settings("# comment\nfamily = rue\n n=20 # trailing\n\nseed = 4\nn = 25\n");
  CHECK(s.at("family") == "rue");
  CHECK(s.at("n") == "25");
  CHECK(s.at("seed") == "4");
  try {
    parse_settings("family = rue\nno equals sign\n");
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  const ExperimentConfig cfg = experiment_from_settings(
      {{"family", "scale-free"}, {"n", "30"}, {"k", "0.4"}, {"algo", "exact"}, {"layout_iterations", "20"}});
  const auto& sf = std::get<ScaleFreeConfig>(cfg.generator.family);
  CHECK(sf.n == 30);
  CHECK(sf.k_attract == 0.4);
  CHECK(sf.layout_iterations == 20);
  CHECK(cfg.solver.algorithm == Algorithm::kExactDp);

  CHECK_THROWS_AS(experiment_from_settings({{"family", "rue"}, {"bogus", "1"}}), Error);
  CHECK_THROWS_AS(experiment_from_settings({{"family", "rue"}, {"alpha", "0.1"}}), Error);
  CHECK_THROWS_AS(experiment_from_settings({{"family", "rue"}, {"n", "ten"}}), Error);
  CHECK_THROWS_AS(experiment_from_settings({{"family", "rue"}, {"count", "0"}}), Error);
}

TEST_CASE("csv round trip and summary recomputation") {
  const PipelineReport report = run_pipeline(small_experiment());
  REQUIRE(report.rows.size() == 12);
  CHECK(report.summary.completed == 12);
  const std::string csv = rows_to_csv(report.rows);
  CHECK(csv.rfind("name,n,family,seed,tour_len,opt_len,gap,rho,tie_count,error\n", 0) == 0);
  const auto back = rows_from_csv(csv);
  CHECK(rows_to_csv(back) == csv);

  const PipelineSummary again = summarize_rows(back, report.config.defect_threshold,
                                               report.config.histogram_bins);
  CHECK(summary_to_json(again, report.config).dump() ==
        summary_to_json(report.summary, report.config).dump());
  CHECK(histogram_to_csv(again.histogram) == histogram_to_csv(report.summary.histogram));

  const auto j = summary_to_json(report.summary, report.config);
  for (const char* key : {"family", "n", "count", "rho_mean", "rho_sd", "mean_len", "defect_rate",
                          "master_seed", "config"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("rows with errors survive the csv") {
  InstanceRow bad;
  bad.name = "x";
  bad.n = 30;
  bad.family = "rue";
  bad.seed = 5;
  bad.error = "too big, sorry";
  InstanceRow good = bad;
  good.name = "y";
  good.error.clear();
  good.tour_len = 1.5;
  good.rho = 0.75;
  good.tie_count = 0;
  const std::vector<InstanceRow> rows{bad, good};
  const auto back = rows_from_csv(rows_to_csv(rows));
  REQUIRE(back.size() == 2);
  CHECK_FALSE(back[0].ok());
  CHECK(back[0].error.find(',') == std::string::npos);
  CHECK(back[1].rho == 0.75);
  CHECK_FALSE(back[1].gap.has_value());
  const PipelineSummary s = summarize_rows(back, 0.001, 4);
  CHECK(s.completed == 1);
  CHECK(s.count == 2);
}

TEST_CASE("pipeline output does not depend on jobs") {
  ExperimentConfig a = small_experiment();
  ExperimentConfig b = small_experiment();
  b.jobs = 4;
  const auto dir_a = test::scratch_dir("jobs-a");
  const auto dir_b = test::scratch_dir("jobs-b");
  write_report(run_pipeline(a), dir_a);
  write_report(run_pipeline(b), dir_b);
  for (const char* f : {"instances.csv", "summary.json", "histogram.csv"}) {
    CHECK(read_file(dir_a / f) == read_file(dir_b / f));
  }
}

TEST_CASE("file pairing") {
  CHECK(match_key("dir/eil51.opt.tour") == "eil51");
  CHECK(match_key("a.json") == "a");
  const auto inst = test::scratch_dir("pair-inst");
  const auto tours = test::scratch_dir("pair-tours");
  write_file(inst / "a.json", "{}");
  write_file(inst / "b.json", "{}");
  write_file(tours / "a.tour", "");
  try {
    pair_files(inst, tours);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("b.json") != std::string::npos);
  }
  write_file(tours / "b.tour", "");
  CHECK(pair_files(inst, tours).size() == 2);
}

TEST_CASE("external tour evaluation") {
  GeneratorConfig gc;
  gc.family = RueConfig{50};
  gc.master_seed = 3;
  const auto instances = gen_batch(gc, 10);
  const auto idir = test::scratch_dir("eval-inst");
  const auto nn_dir = test::scratch_dir("eval-nn");
  const auto ref_dir = test::scratch_dir("eval-ref");
  SolveConfig sc;
  sc.restarts = 4;
  for (const auto& inst : instances) {
    write_file(idir / (inst.name + ".json"), instance_to_json(inst).dump());
    const Tour nn = nn_tour(inst);
    write_file(nn_dir / (inst.name + ".tour"), write_tour(inst.name, nn.order));
    const Tour ls = local_search_tour(inst, sc);
    write_file(ref_dir / (inst.name + ".tour"), write_tour(inst.name, ls.order));
  }
  const EvalReport same = evaluate_external_tours(idir, ref_dir, ref_dir);
  CHECK(same.evaluated == 10);
  CHECK(same.defect_rate.value() == 0.0);

  const EvalReport nn = evaluate_external_tours(idir, nn_dir, ref_dir, 0.001, {}, 5);
  CHECK(nn.defect_rate.value() > 0.5);
  CHECK(nn.by_rho.size() == 5);
  CHECK(eval_to_json(nn).contains("defect_rate"));

  fs::remove(nn_dir / (instances[3].name + ".tour"));
  const EvalReport missing = evaluate_external_tours(idir, nn_dir, ref_dir);
  CHECK(missing.evaluated == 9);
  CHECK_FALSE(missing.rows[3].ok());
}

TEST_CASE("nearest neighbour tours fare worse on the comb layout") {
  double rue_gap = 0.0, comb_gap = 0.0;
  SolveConfig sc;
  const int reps = 100;
  for (std::uint64_t i = 0; i < reps; ++i) {
    const Instance rue = gen_rue(50, sub_seed(8, i));
    rue_gap += optimality_gap(nn_tour(rue).length, local_search_tour(rue, sc).length) / reps;
  }
  ParallelConfig pc;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Instance comb = gen_parallel_perturbed(pc, sub_seed(8, i));
    comb_gap += optimality_gap(nn_tour(comb).length, local_search_tour(comb, sc).length) / 10.0;
  }
  CHECK(comb_gap > rue_gap);
}

TEST_CASE("render overlay") {
  const Instance tri("tri", {{0, 0}, {1, 0}, {0, 1}});
  const std::vector<NodeId> order{0, 1, 2};
  const NeighborSets sets = nn_sets(tri, Metric::kExact, 0.0);
  CHECK(uncovered_nn_edges(tri, order, sets).empty());
  const std::string svg = render_overlay(tri, order, sets);
  CHECK(count_of(svg, "class=\"tour\"") == 3);
  CHECK(count_of(svg, "class=\"nn-uncovered\"") == 0);
  CHECK(count_of(svg, "class=\"node\"") == 3);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(render_overlay(tri, order, sets) == svg);

  ParallelConfig pc;
  pc.rotate = false;
  pc.rescale = false;
  const Instance comb = gen_parallel_perturbed(pc, 1);
  const auto comb_order = test::comb_order(50);
  const auto comb_sets = nn_sets(comb, Metric::kExact, 0.0);
  // Nearest-neighbour pairs are mutual here, so n - 2 nodes share n/2 - 1 segments.
  const auto missed = uncovered_nn_edges(comb, comb_order, comb_sets);
  CHECK(missed.size() == 24);
  std::vector<char> touched(50, 0);
  for (auto [i, j] : missed) touched[static_cast<std::size_t>(i)] = touched[static_cast<std::size_t>(j)] = 1;
  CHECK(std::count(touched.begin(), touched.end(), 1) == 48);

  int small = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const Instance rue = gen_rue(50, sub_seed(21, i));
    SolveConfig sc;
    const Tour t = local_search_tour(rue, sc);
    if (uncovered_nn_edges(rue, t.order, nn_sets(rue, Metric::kExact, 0.0)).size() < 8) ++small;
  }
  CHECK(small >= 8);
}

TEST_CASE("cli analytic") {
  CliResult r = cli({"analytic", "lower-bound", "--beta", "0.7124"});
  CHECK(r.code == 0);
  CHECK(r.out == "0.6005\n");
  {
    test::WarningCapture warnings;
    r = cli({"analytic", "lower-bound", "--beta", "0.90304"});
    CHECK(r.out == "0.0000\n");
    CHECK(warnings.taken().size() == 1);
  }
  r = cli({"analytic", "erk", "--n", "100", "--k", "1", "--asymptotic"});
  CHECK(r.out == "0.05\n");
  r = cli({"analytic", "lower-bound", "--beta", "-1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("\"error\"") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CliResult r = cli({"gen", "--bogus"});
  CHECK(r.code == 2);
  const auto j = nlohmann::json::parse(r.err);
  CHECK(j.at("error").at("code") == "usage");
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli gen, solve, density") {
  const auto dir = test::scratch_dir("cli-gen");
  CliResult r = cli({"gen", "--family", "rue", "--n", "20", "--count", "10", "--seed", "1", "--out",
                     (dir / "inst").string()});
  REQUIRE(r.code == 0);
  CHECK(list_files(dir / "inst").size() == 10);

  r = cli({"solve", "--instances", (dir / "inst").string(), "--algo", "exact", "--out",
           (dir / "tours").string()});
  REQUIRE(r.code == 0);
  CHECK(list_files(dir / "tours").size() == 10);

  r = cli({"density", "--instances", (dir / "inst").string(), "--tours", (dir / "tours").string()});
  CHECK(r.code == 0);
  CHECK(count_of(r.out, "\n") == 11);

  const auto victim = list_files(dir / "tours")[4];
  fs::remove(victim);
  r = cli({"density", "--instances", (dir / "inst").string(), "--tours", (dir / "tours").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find(match_key(victim)) != std::string::npos);
}

TEST_CASE("cli seed precedence") {
  const auto dir = test::scratch_dir("cli-seed");
  write_file(dir / "exp.cfg", "family = rue\nn = 12\ncount = 1\nseed = 5\n");
  const auto name_with = [&](std::vector<std::string> extra, const char* env) {
    const auto out = dir / "out";
    fs::remove_all(out);
    std::vector<std::string> args{"gen", "--config", (dir / "exp.cfg").string(), "--out", out.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(cli(args, env).code == 0);
    return read_file(list_files(out).at(0));
  };
  const std::string from_config = name_with({}, nullptr);
  const std::string from_env = name_with({}, "6");
  const std::string from_flag = name_with({"--seed", "7"}, "6");
  CHECK(from_config != from_env);
  CHECK(from_env != from_flag);
  CHECK(name_with({"--seed", "6"}, nullptr) == from_env);
  CHECK(name_with({"--seed", "7"}, nullptr) == from_flag);
  CHECK(name_with({}, "5") == from_config);
}

TEST_CASE("cli stats and recompute") {
  const auto dir = test::scratch_dir("cli-stats");
  CliResult r = cli({"stats", "--family", "rue", "--n", "12", "--count", "8", "--seed", "2", "--algo",
                     "exact", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto full = nlohmann::json::parse(read_file(dir / "summary.json"));
  r = cli({"stats", "--csv", (dir / "instances.csv").string()});
  REQUIRE(r.code == 0);
  const auto again = nlohmann::json::parse(r.out);
  for (const char* key : {"rho_mean", "rho_sd", "mean_len", "count", "completed"}) {
    CHECK(again.at(key) == full.at(key));
  }
}

TEST_CASE("cli render and tsplib conversion") {
  const auto dir = test::scratch_dir("cli-render");
  const auto data = test::data_dir() / "tsplib";
  CliResult r = cli({"render", "--instance", (data / "berlin52.tsp").string(), "--tour",
                     (data / "berlin52.opt.tour").string(), "--out", (dir / "b.svg").string()});
  REQUIRE(r.code == 0);
  const std::string svg = read_file(dir / "b.svg");
  CHECK(count_of(svg, "class=\"tour\"") == 52);

  r = cli({"tsplib", "--in", (data / "eil51.tsp").string(), "--out", (dir / "eil51.json").string()});
  REQUIRE(r.code == 0);
  CHECK(load_instance(dir / "eil51.json").nodes == load_instance(data / "eil51.tsp").nodes);
}
