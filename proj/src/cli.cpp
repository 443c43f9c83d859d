#include "nnd/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nnd/analytic.hpp"
#include "nnd/bench.hpp"
#include "nnd/error.hpp"
#include "nnd/generators.hpp"
#include "nnd/parallel.hpp"
#include "nnd/rng.hpp"
#include "nnd/tsplib_io.hpp"

namespace nnd {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kSeedEnv = "NND_SEED";

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Flags that feed the settings map. Only flags given on the command line
// override settings from --config and the environment.
class SettingFlags {
 public:
  void add(CLI::App* app, const std::string& key, const std::string& help) {
    auto& slot = values_[key];
    options_.emplace_back(key, app->add_option("--" + key, slot, help));
  }

  void add_experiment(CLI::App* app) {
    add(app, "family", "rue | rne | scale-free | parallel | convolution");
    add(app, "n", "instance size");
    add(app, "count", "number of instances");
    add(app, "seed", "master seed (flag > NND_SEED > config)");
  }

  void add_family(CLI::App* app) {
    add(app, "mean", "rne: coordinate mean");
    add(app, "sd", "rne: coordinate standard deviation");
    add(app, "m0", "scale-free: seed path length");
    add(app, "m", "scale-free: edges per new node");
    add(app, "k", "scale-free: attraction constant");
    add(app, "layout", "scale-free: force | stress");
    add(app, "layout-iterations", "scale-free: layout iterations");
    add(app, "layout-tolerance", "scale-free: layout stopping tolerance");
    add(app, "line-gap", "parallel: gap between the two rows");
    add(app, "alpha", "parallel: fraction of points with large noise");
    add(app, "sigma-large", "parallel: large noise sd");
    add(app, "sigma-small", "parallel: small noise sd");
    add(app, "rotate", "parallel: random rotation (true/false)");
    add(app, "rescale", "parallel: rescale into the unit square (true/false)");
    add(app, "lambda-max", "convolution: upper bound of lambda");
    add(app, "sweep", "parallel: draw noise parameters per instance (true/false)");
  }

  void add_solver(CLI::App* app) {
    add(app, "algo", "nn | exact | ls");
    add(app, "restarts", "local-search restarts");
    add(app, "max-no-improve", "local-search perturbations without improvement");
  }

  void add_density(CLI::App* app) {
    add(app, "metric", "neighbour-set metric: exact | tsplib | torus");
    add(app, "tie-eps", "relative tie tolerance for nearest neighbours");
  }

  void add_config(CLI::App* app) {
    app->add_option("--config", config_path_, "key = value settings file");
  }

  // config file < NND_SEED < flags.
  Settings resolve(const EnvLookup& env) const {
    Settings s;
    if (!config_path_.empty()) s = parse_settings(read_file(config_path_));
    if (const char* seed = env(kSeedEnv); seed && *seed) s["seed"] = seed;
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) s[key] = values_.at(key);
    }
    return s;
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
  std::string config_path_;
};

std::vector<fs::path> instance_inputs(const std::string& file, const std::string& dir) {
  if (!file.empty() && !dir.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "give either --instance or --instances, not both");
  }
  if (!file.empty()) return {fs::path(file)};
  if (!dir.empty()) return list_files(dir);
  throw Error(ErrorCode::kInvalidConfig, "--instance or --instances is required");
}

SolveConfig solver_from(const ExperimentConfig& cfg) { return cfg.solver; }

DensityOptions density_from(const SettingFlags& flags, const EnvLookup& env) {
  // Only density keys matter here; parse them without family validation.
  const Settings s = flags.resolve(env);
  DensityOptions d;
  if (auto it = s.find("metric"); it != s.end()) d.metric = parse_metric(it->second);
  if (auto it = s.find("tie-eps"); it != s.end()) {
    Settings one{{"tie-eps", it->second}};
    d.tie_eps = experiment_from_settings(one).density.tie_eps;
  }
  return d;
}

void print_error(std::ostream& err, std::string_view code, std::string_view message) {
  err << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env_in) {
  const EnvLookup env = env_in ? env_in : EnvLookup([](const char* k) { return std::getenv(k); });

  CLI::App app{"Nearest-neighbour density toolkit for Euclidean TSP instances", "nnd"};
  app.require_subcommand(1);
  int jobs = 1;

  // gen
  auto* gen = app.add_subcommand("gen", "generate instances");
  SettingFlags gen_flags;
  gen_flags.add_config(gen);
  gen_flags.add_experiment(gen);
  gen_flags.add_family(gen);
  std::string gen_out, gen_format = "json";
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--format", gen_format, "json | tsplib")->check(CLI::IsMember({"json", "tsplib"}));
  gen->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve instances");
  SettingFlags solve_flags;
  solve_flags.add_config(solve_cmd);
  solve_flags.add_solver(solve_cmd);
  solve_flags.add(solve_cmd, "seed", "master seed (flag > NND_SEED > config)");
  std::string solve_instance, solve_instances, solve_out, solve_format = "json";
  solve_cmd->add_option("--instance", solve_instance, "instance file");
  solve_cmd->add_option("--instances", solve_instances, "directory of instance files");
  solve_cmd->add_option("--out", solve_out, "output directory for tours")->required();
  solve_cmd->add_option("--format", solve_format, "json | tsplib")
      ->check(CLI::IsMember({"json", "tsplib"}));
  solve_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  // density
  auto* density_cmd = app.add_subcommand("density", "nearest-neighbour density of given tours");
  SettingFlags density_flags;
  density_flags.add_config(density_cmd);
  density_flags.add_density(density_cmd);
  std::string d_instance, d_tour, d_instances, d_tours, d_out;
  int d_bins = 20;
  density_cmd->add_option("--instance", d_instance, "instance file");
  density_cmd->add_option("--tour", d_tour, "tour file");
  density_cmd->add_option("--instances", d_instances, "directory of instance files");
  density_cmd->add_option("--tours", d_tours, "directory of tour files, name-matched");
  density_cmd->add_option("--bins", d_bins, "histogram bins");
  density_cmd->add_option("--out", d_out, "directory for density.csv, summary.json, histogram.csv");
  density_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score external tours against references");
  SettingFlags eval_flags;
  eval_flags.add_config(eval_cmd);
  eval_flags.add_density(eval_cmd);
  std::string e_instances, e_tours, e_reference, e_out;
  double e_threshold = kDefaultDefectThreshold;
  int e_bins = 10;
  eval_cmd->add_option("--instances", e_instances, "directory of instance files")->required();
  eval_cmd->add_option("--tours", e_tours, "directory of candidate tours")->required();
  eval_cmd->add_option("--reference", e_reference, "directory of reference tours")->required();
  eval_cmd->add_option("--defect-threshold", e_threshold, "gap above which a tour is defective");
  eval_cmd->add_option("--bins", e_bins, "rho quantile bins for the defect table");
  eval_cmd->add_option("--out", e_out, "directory for eval.csv, defect_by_rho.csv, eval.json");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "run a generate-solve-score experiment");
  SettingFlags stats_flags;
  stats_flags.add_config(stats_cmd);
  stats_flags.add_experiment(stats_cmd);
  stats_flags.add_family(stats_cmd);
  stats_flags.add_solver(stats_cmd);
  stats_flags.add_density(stats_cmd);
  stats_flags.add(stats_cmd, "reference", "reference algorithm for gaps: nn | exact | ls | none");
  stats_flags.add(stats_cmd, "defect-threshold", "gap above which a tour is defective");
  stats_flags.add(stats_cmd, "bins", "histogram bins");
  stats_flags.add(stats_cmd, "out", "report directory");
  std::string stats_csv;
  stats_cmd->add_option("--csv", stats_csv, "recompute the summary of an existing instances.csv");
  stats_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  // analytic
  auto* analytic_cmd = app.add_subcommand("analytic", "closed-form quantities");
  analytic_cmd->require_subcommand(1);
  auto* lb_cmd = analytic_cmd->add_subcommand("lower-bound", "asymptotic lower bound on rho");
  double beta = AnalyticConstants{}.beta;
  lb_cmd->add_option("--beta", beta, "tour constant");
  auto* erk_cmd = analytic_cmd->add_subcommand("erk", "expected k-th nearest-neighbour distance");
  long long a_n = 0;
  int a_k = 1, a_dim = 2, a_moment = 1;
  bool a_asymptotic = false;
  erk_cmd->add_option("--n", a_n, "number of points")->required();
  erk_cmd->add_option("--k", a_k, "neighbour order");
  erk_cmd->add_option("--dim", a_dim, "dimension");
  erk_cmd->add_option("--moment", a_moment, "1 for E(r_k), 2 for E(r_k^2)")
      ->check(CLI::IsMember({1, 2}));
  erk_cmd->add_flag("--asymptotic", a_asymptotic, "large-n form (dimension 2)");
  auto* pdf_cmd = analytic_cmd->add_subcommand("pdf-r1", "density of the nearest-neighbour distance");
  long long p_n = 0;
  double p_r = 0.0;
  bool p_cdf = false;
  pdf_cmd->add_option("--n", p_n, "number of points")->required();
  pdf_cmd->add_option("--r", p_r, "distance")->required();
  pdf_cmd->add_flag("--cdf", p_cdf, "print the distribution function instead");

  // render
  auto* render_cmd = app.add_subcommand("render", "SVG overlay of a tour and its missed NN edges");
  SettingFlags render_flags;
  render_flags.add_config(render_cmd);
  render_flags.add_density(render_cmd);
  std::string r_instance, r_tour, r_out;
  render_cmd->add_option("--instance", r_instance, "instance file")->required();
  render_cmd->add_option("--tour", r_tour, "tour file")->required();
  render_cmd->add_option("--out", r_out, "SVG file (stdout if omitted)");

  // tsplib
  auto* tsplib_cmd = app.add_subcommand("tsplib", "convert between TSPLIB and toolkit JSON");
  std::string t_in, t_out;
  tsplib_cmd->add_option("--in", t_in, "input instance")->required();
  tsplib_cmd->add_option("--out", t_out, "output instance; .json selects toolkit JSON")->required();

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "sweep the scale-free attraction constant");
  SettingFlags cal_flags;
  cal_flags.add_config(cal_cmd);
  cal_flags.add(cal_cmd, "n", "instance size");
  cal_flags.add(cal_cmd, "count", "instances per k");
  cal_flags.add(cal_cmd, "seed", "master seed (flag > NND_SEED > config)");
  cal_flags.add(cal_cmd, "m0", "seed path length");
  cal_flags.add(cal_cmd, "m", "edges per new node");
  cal_flags.add(cal_cmd, "layout", "force | stress");
  cal_flags.add(cal_cmd, "layout-iterations", "layout iterations");
  cal_flags.add(cal_cmd, "layout-tolerance", "layout stopping tolerance");
  cal_flags.add_solver(cal_cmd);
  std::vector<double> k_values{0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2};
  double target = kScaleFreeTarget;
  std::string cal_out;
  cal_cmd->add_option("--k-values", k_values, "comma-separated k grid")->delimiter(',');
  cal_cmd->add_option("--target", target, "rho to match");
  cal_cmd->add_option("--out", cal_out, "CSV file for the sweep");
  cal_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (gen->parsed()) {
      Settings s = gen_flags.resolve(env);
      const ExperimentConfig cfg = experiment_from_settings(s);
      const auto instances =
          cfg.sweep ? gen_parallel_sweep(std::get<ParallelConfig>(cfg.generator.family), cfg.count,
                                         cfg.generator.master_seed, jobs)
                    : gen_batch(cfg.generator, cfg.count, jobs);
      for (const auto& inst : instances) {
        if (gen_format == "json") {
          write_file(fs::path(gen_out) / (inst.name + ".json"), instance_to_json(inst).dump(1) + "\n");
        } else {
          write_file(fs::path(gen_out) / (inst.name + ".tsp"), write_instance(inst));
        }
      }
      out << "wrote " << instances.size() << " instances to " << gen_out << '\n';
      return 0;
    }

    if (solve_cmd->parsed()) {
      Settings s = solve_flags.resolve(env);
      const ExperimentConfig cfg = experiment_from_settings(s);
      SolveConfig sc = solver_from(cfg);
      sc.seed = cfg.generator.master_seed;
      const auto files = instance_inputs(solve_instance, solve_instances);
      std::vector<Instance> instances;
      for (const auto& f : files) instances.push_back(load_instance(f));
      const auto outcomes = solve_batch(instances, sc, jobs);
      int failures = 0;
      for (std::size_t i = 0; i < files.size(); ++i) {
        const std::string key = match_key(files[i]);
        if (!outcomes[i].ok()) {
          ++failures;
          print_error(err, "solve-failed", files[i].filename().string() + ": " + outcomes[i].error);
          continue;
        }
        const Tour& t = *outcomes[i].tour;
        if (solve_format == "json") {
          write_file(fs::path(solve_out) / (key + ".json"),
                     tour_to_json(instances[i].name, t).dump() + "\n");
        } else {
          write_file(fs::path(solve_out) / (key + ".tour"),
                     write_tour(instances[i].name, t.order, t.length));
        }
        out << key << ' ' << format_double(t.length) << '\n';
      }
      return failures == 0 ? 0 : 1;
    }

    if (density_cmd->parsed()) {
      const DensityOptions opts = density_from(density_flags, env);
      std::vector<FilePair> pairs;
      if (!d_instances.empty() || !d_tours.empty()) {
        if (d_instances.empty() || d_tours.empty()) {
          throw Error(ErrorCode::kInvalidConfig, "--instances and --tours go together");
        }
        pairs = pair_files(d_instances, d_tours);
      } else if (!d_instance.empty() && !d_tour.empty()) {
        pairs.push_back({d_instance, d_tour});
      } else {
        throw Error(ErrorCode::kInvalidConfig,
                    "give --instance with --tour, or --instances with --tours");
      }
      std::vector<DensityReport> reports(pairs.size());
      std::vector<std::string> names(pairs.size());
      std::vector<int> sizes(pairs.size());
      parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        const Instance inst = load_instance(pairs[i].instance);
        const auto order = load_tour(pairs[i].tour, inst.size());
        reports[i] = rho(inst, order, opts);
        names[i] = match_key(pairs[i].instance);
        sizes[i] = inst.size();
      });
      std::string csv = "name,n,rho,tie_count\n";
      std::vector<double> values;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        csv += names[i] + ',' + std::to_string(sizes[i]) + ',' + format_double(reports[i].rho) +
               ',' + std::to_string(reports[i].tie_count) + '\n';
        values.push_back(reports[i].rho);
      }
      const RhoSummary summary = summarize_rho(values, d_bins);
      const json sj{{"count", summary.count}, {"rho_mean", summary.mean}, {"rho_sd", summary.sd}};
      out << csv;
      if (!d_out.empty()) {
        write_file(fs::path(d_out) / "density.csv", csv);
        write_file(fs::path(d_out) / "summary.json", sj.dump(2) + "\n");
        write_file(fs::path(d_out) / "histogram.csv", histogram_to_csv(summary.bins));
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      const DensityOptions opts = density_from(eval_flags, env);
      const EvalReport report =
          evaluate_external_tours(e_instances, e_tours, e_reference, e_threshold, opts, e_bins);
      if (!e_out.empty()) {
        write_file(fs::path(e_out) / "eval.csv", eval_rows_to_csv(report.rows));
        write_file(fs::path(e_out) / "defect_by_rho.csv", defect_bins_to_csv(report.by_rho));
        write_file(fs::path(e_out) / "eval.json", eval_to_json(report).dump(2) + "\n");
      }
      out << eval_to_json(report).dump(2) << '\n';
      return report.evaluated == report.rows.size() ? 0 : 1;
    }

    if (stats_cmd->parsed()) {
      if (!stats_csv.empty()) {
        Settings s = stats_flags.resolve(env);
        const ExperimentConfig cfg = experiment_from_settings(s);
        const auto rows = rows_from_csv(read_file(stats_csv));
        const PipelineSummary summary = summarize_rows(rows, cfg.defect_threshold, cfg.histogram_bins);
        json j = summary_to_json(summary, cfg);
        j.erase("config");
        j.erase("master_seed");
        out << j.dump(2) << '\n';
        return 0;
      }
      Settings s = stats_flags.resolve(env);
      ExperimentConfig cfg = experiment_from_settings(s);
      cfg.jobs = jobs;
      if (cfg.out_dir.empty()) throw Error(ErrorCode::kInvalidConfig, "--out is required");
      const PipelineReport report = run_pipeline(cfg);
      write_report(report, cfg.out_dir);
      out << summary_to_json(report.summary, report.config).dump(2) << '\n';
      return report.summary.completed == report.summary.count ? 0 : 1;
    }

    if (analytic_cmd->parsed()) {
      if (lb_cmd->parsed()) {
        out << fixed(rho_lower_bound(beta).value, 4) << '\n';
      } else if (erk_cmd->parsed()) {
        double v = 0.0;
        if (a_asymptotic) {
          if (a_moment != 1 || a_dim != 2) {
            throw Error(ErrorCode::kInvalidConfig, "the asymptotic form covers E(r_k) in 2-D only");
          }
          v = expected_rk_asymptotic(a_n, a_k);
        } else {
          v = a_moment == 1 ? expected_rk(a_n, a_k, a_dim) : expected_rk2(a_n, a_k, a_dim);
        }
        out << general(v) << '\n';
      } else if (pdf_cmd->parsed()) {
        out << general(p_cdf ? cdf_r1(p_n, p_r) : pdf_r1(p_n, p_r)) << '\n';
      }
      return 0;
    }

    if (render_cmd->parsed()) {
      const DensityOptions opts = density_from(render_flags, env);
      const Instance inst = load_instance(r_instance);
      const auto order = load_tour(r_tour, inst.size());
      const auto sets = nn_sets(inst, opts.metric.value_or(default_density_metric(inst.metric)),
                                opts.tie_eps.value_or(default_tie_eps(inst.metric)));
      const std::string svg = render_overlay(inst, order, sets);
      if (r_out.empty()) {
        out << svg;
      } else {
        write_file(r_out, svg);
      }
      return 0;
    }

    if (tsplib_cmd->parsed()) {
      const Instance inst = load_instance(t_in);
      if (fs::path(t_out).extension() == ".json") {
        write_file(t_out, instance_to_json(inst).dump(1) + "\n");
      } else {
        write_file(t_out, write_instance(inst));
      }
      out << "wrote " << inst.name << " (" << inst.size() << " nodes) to " << t_out << '\n';
      return 0;
    }

    if (cal_cmd->parsed()) {
      Settings s = cal_flags.resolve(env);
      s["family"] = "scale-free";
      const ExperimentConfig cfg = experiment_from_settings(s);
      const Calibration cal =
          calibrate_scale_free(std::get<ScaleFreeConfig>(cfg.generator.family), k_values, cfg.count,
                               target, cfg.generator.master_seed, cfg.solver, jobs);
      std::string csv = "k,rho_mean,rho_sd\n";
      for (const auto& row : cal.rows) {
        csv += format_double(row.k) + ',' + format_double(row.rho_mean) + ',' +
               format_double(row.rho_sd) + '\n';
      }
      if (!cal_out.empty()) write_file(cal_out, csv);
      out << csv << json{{"best_k", cal.best_k}, {"target", cal.target}}.dump() << '\n';
      return 0;
    }
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace nnd
