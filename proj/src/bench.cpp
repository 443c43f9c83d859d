#include "nnd/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "nnd/error.hpp"
#include "nnd/generators.hpp"
#include "nnd/parallel.hpp"
#include "nnd/rng.hpp"
#include "nnd/tsplib_io.hpp"

namespace nnd {

namespace {

using json = nlohmann::json;

// Solver randomness is a separate stream of the master seed.
constexpr std::uint64_t kSolverStream = 101;
constexpr std::uint64_t kReferenceStream = 102;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_key(std::string_view key) {
  std::string out;
  for (char c : key) {
    out.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorCode::kInvalidConfig,
              "setting '" + key + "': expected " + what + ", got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* what) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, what);
  return out;
}

int to_int(const std::string& key, const std::string& v) { return parse_number<int>(key, v, "an integer"); }
double to_double(const std::string& key, const std::string& v) {
  const double d = parse_number<double>(key, v, "a number");
  if (!std::isfinite(d)) bad_value(key, v, "a finite number");
  return d;
}
std::uint64_t to_u64(const std::string& key, const std::string& v) {
  return parse_number<std::uint64_t>(key, v, "an unsigned integer");
}
bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = normalize_key(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, v, "a boolean");
}

template <typename F>
auto wrap_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
}

// Applies one family-specific key; false if the key is not family-specific.
bool apply_family_key(FamilyConfig& family, const std::string& key, const std::string& value) {
  if (auto* c = std::get_if<RneConfig>(&family)) {
    if (key == "mean") return c->mean = to_double(key, value), true;
    if (key == "sd") return c->sd = to_double(key, value), true;
  } else if (auto* c = std::get_if<ScaleFreeConfig>(&family)) {
    if (key == "m0") return c->m0 = to_int(key, value), true;
    if (key == "m") return c->m = to_int(key, value), true;
    if (key == "k" || key == "k-attract") return c->k_attract = to_double(key, value), true;
    if (key == "layout") {
      c->layout = wrap_config([&] { return parse_layout_method(value); });
      return true;
    }
    if (key == "layout-iterations") return c->layout_iterations = to_int(key, value), true;
    if (key == "layout-tolerance") return c->layout_tolerance = to_double(key, value), true;
  } else if (auto* c = std::get_if<ParallelConfig>(&family)) {
    if (key == "line-gap") return c->line_gap = to_double(key, value), true;
    if (key == "alpha") return c->alpha = to_double(key, value), true;
    if (key == "sigma-large") return c->sigma_large = to_double(key, value), true;
    if (key == "sigma-small") return c->sigma_small = to_double(key, value), true;
    if (key == "rotate") return c->rotate = to_bool(key, value), true;
    if (key == "rescale") return c->rescale = to_bool(key, value), true;
  } else if (auto* c = std::get_if<ConvolutionConfig>(&family)) {
    if (key == "lambda-max") return c->lambda_max = to_double(key, value), true;
  }
  return false;
}

const std::set<std::string>& family_keys() {
  static const std::set<std::string> keys{
      "mean", "sd", "m0", "m", "k", "k-attract", "layout", "layout-iterations",
      "layout-tolerance", "line-gap", "alpha", "sigma-large", "sigma-small", "rotate", "rescale",
      "lambda-max"};
  return keys;
}

FamilyConfig default_family(const std::string& name, int n) {
  if (name == "rue") return RueConfig{n};
  if (name == "rne") {
    RneConfig c;
    c.n = n;
    return c;
  }
  if (name == "scale-free") {
    ScaleFreeConfig c;
    c.n = n;
    return c;
  }
  if (name == "parallel") {
    ParallelConfig c;
    c.n = n;
    return c;
  }
  if (name == "convolution") {
    ConvolutionConfig c;
    c.n = n;
    return c;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown family '" + name + "' (rue, rne, scale-free, parallel, convolution)");
}

void set_family_n(FamilyConfig& family, int n) {
  std::visit([n](auto& c) { c.n = n; }, family);
}

std::string opt_num(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double mean_of(std::span<const double> v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> csv_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_number<double>("csv", s, "a number");
}

// Keeps a CSV field single-line and comma-free.
std::string csv_field(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

std::string error_text(const std::exception& e) {
  std::string msg = e.what();
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    msg = std::string(to_string(err->code())) + ": " + msg;
  }
  return csv_field(std::move(msg));
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  validate(cfg.generator.family);
  if (cfg.count < 1) throw Error(ErrorCode::kInvalidConfig, "count must be at least 1");
  if (!(cfg.defect_threshold > 0.0) || !std::isfinite(cfg.defect_threshold)) {
    throw Error(ErrorCode::kInvalidConfig, "defect threshold must be finite and > 0");
  }
  if (cfg.histogram_bins < 1) throw Error(ErrorCode::kInvalidConfig, "bins must be at least 1");
  if (cfg.solver.restarts < 1) throw Error(ErrorCode::kInvalidConfig, "restarts must be at least 1");
  if (cfg.solver.max_no_improve < 0) {
    throw Error(ErrorCode::kInvalidConfig, "max-no-improve must be >= 0");
  }
  if (cfg.density.tie_eps && !(*cfg.density.tie_eps >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "tie-eps must be >= 0");
  }
  if (cfg.sweep && !std::holds_alternative<ParallelConfig>(cfg.generator.family)) {
    throw Error(ErrorCode::kInvalidConfig, "sweep applies to the parallel family only");
  }
}

Settings parse_settings(std::string_view text) {
  Settings out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected 'key = value', got '" + body + "'");
    }
    const std::string key = normalize_key(trim(std::string_view(body).substr(0, eq)));
    if (key.empty()) throw ParseError(line_no, "empty key");
    out[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

ExperimentConfig experiment_from_settings(const Settings& raw) {
  Settings settings;
  for (const auto& [k, v] : raw) settings[normalize_key(k)] = v;

  ExperimentConfig cfg;
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = settings.find(key);
    return it == settings.end() ? nullptr : &it->second;
  };
  const std::string family = get("family") ? *get("family") : std::string("rue");
  const int n = get("n") ? to_int("n", *get("n")) : 50;
  cfg.generator.family = default_family(family, n);
  set_family_n(cfg.generator.family, n);

  for (const auto& [key, value] : settings) {
    if (key == "family" || key == "n") continue;
    if (key == "count") {
      const long long c = parse_number<long long>(key, value, "an integer");
      if (c < 1) bad_value(key, value, "a count >= 1");
      cfg.count = static_cast<std::size_t>(c);
    } else if (key == "seed") {
      cfg.generator.master_seed = to_u64(key, value);
    } else if (key == "algo") {
      cfg.solver.algorithm = wrap_config([&] { return parse_algorithm(value); });
    } else if (key == "reference") {
      if (normalize_key(value) == "none" || value.empty()) {
        cfg.reference.reset();
      } else {
        cfg.reference = wrap_config([&] { return parse_algorithm(value); });
      }
    } else if (key == "restarts") {
      cfg.solver.restarts = to_int(key, value);
    } else if (key == "max-no-improve") {
      cfg.solver.max_no_improve = to_int(key, value);
    } else if (key == "neighbor-k") {
      cfg.solver.neighbor_k = to_int(key, value);
    } else if (key == "metric") {
      cfg.density.metric = wrap_config([&] { return parse_metric(value); });
    } else if (key == "tie-eps") {
      cfg.density.tie_eps = to_double(key, value);
    } else if (key == "defect-threshold") {
      cfg.defect_threshold = to_double(key, value);
    } else if (key == "bins") {
      cfg.histogram_bins = to_int(key, value);
    } else if (key == "sweep") {
      cfg.sweep = to_bool(key, value);
    } else if (key == "jobs") {
      cfg.jobs = to_int(key, value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (apply_family_key(cfg.generator.family, key, value)) {
      continue;
    } else if (family_keys().count(key)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "setting '" + key + "' does not apply to family " + family);
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown setting '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

json experiment_to_json(const ExperimentConfig& cfg) {
  json solver{{"algorithm", to_string(cfg.solver.algorithm)},
              {"restarts", cfg.solver.restarts},
              {"max_no_improve", cfg.solver.max_no_improve},
              {"neighbor_k", cfg.solver.neighbor_k}};
  json density{{"metric", cfg.density.metric ? json(to_string(*cfg.density.metric)) : json(nullptr)},
               {"tie_eps", opt_json(cfg.density.tie_eps)}};
  return json{{"generator",
               {{"family", family_name(cfg.generator.family)},
                {"params", family_to_json(cfg.generator.family)},
                {"master_seed", cfg.generator.master_seed}}},
              {"count", cfg.count},
              {"solver", solver},
              {"reference", cfg.reference ? json(to_string(*cfg.reference)) : json(nullptr)},
              {"density", density},
              {"defect_threshold", cfg.defect_threshold},
              {"histogram_bins", cfg.histogram_bins},
              {"sweep", cfg.sweep}};
}

std::string rows_to_csv(std::span<const InstanceRow> rows) {
  std::string out = "name,n,family,seed,tour_len,opt_len,gap,rho,tie_count,error\n";
  for (const auto& r : rows) {
    out += r.name + ',' + std::to_string(r.n) + ',' + r.family + ',' + std::to_string(r.seed) + ',' +
           opt_num(r.tour_len) + ',' + opt_num(r.opt_len) + ',' + opt_num(r.gap) + ',' +
           opt_num(r.rho) + ',' + (r.tie_count ? std::to_string(*r.tie_count) : std::string()) +
           ',' + csv_field(r.error) + '\n';
  }
  return out;
}

std::vector<InstanceRow> rows_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != "name,n,family,seed,tour_len,opt_len,gap,rho,tie_count,error") {
    throw ParseError(1, "unexpected CSV header");
  }
  std::vector<InstanceRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ParseError(line_no, "expected 10 fields, got " + std::to_string(f.size()));
    try {
      InstanceRow r;
      r.name = f[0];
      r.n = to_int("n", f[1]);
      r.family = f[2];
      r.seed = to_u64("seed", f[3]);
      r.tour_len = csv_double(f[4]);
      r.opt_len = csv_double(f[5]);
      r.gap = csv_double(f[6]);
      r.rho = csv_double(f[7]);
      if (!f[8].empty()) r.tie_count = to_int("tie_count", f[8]);
      r.error = f[9];
      rows.push_back(std::move(r));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return rows;
}

PipelineSummary summarize_rows(std::span<const InstanceRow> rows, double defect_threshold,
                               int histogram_bins) {
  PipelineSummary s;
  s.count = rows.size();
  if (!rows.empty()) {
    s.family = rows.front().family;
    s.n = rows.front().n;
  }
  std::vector<double> rhos, lens, refs, gaps;
  bool all_have_ref = true;
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    ++s.completed;
    rhos.push_back(r.rho.value_or(0.0));
    lens.push_back(r.tour_len.value_or(0.0));
    if (r.opt_len && r.gap) {
      refs.push_back(*r.opt_len);
      gaps.push_back(*r.gap);
    } else {
      all_have_ref = false;
    }
  }
  if (s.completed == 0) {
    s.histogram = histogram({}, histogram_bins);
    return s;
  }
  const RhoSummary rs = summarize_rho(rhos, histogram_bins);
  s.rho_mean = rs.mean;
  s.rho_sd = rs.sd;
  s.histogram = rs.bins;
  s.mean_len = mean_of(lens);
  if (all_have_ref) {
    s.defect_rate = defect_rate(gaps, defect_threshold);
    s.gaps = summarize_gaps(lens, refs);
  }
  return s;
}

json summary_to_json(const PipelineSummary& s, const ExperimentConfig& cfg) {
  return json{{"config", experiment_to_json(cfg)},
              {"master_seed", cfg.generator.master_seed},
              {"family", s.family},
              {"n", s.n},
              {"count", s.count},
              {"completed", s.completed},
              {"incomplete", s.count - s.completed},
              {"rho_mean", s.rho_mean},
              {"rho_sd", s.rho_sd},
              {"mean_len", s.mean_len},
              {"defect_rate", opt_json(s.defect_rate)},
              {"gap_mean_of_gaps", s.gaps ? json(s.gaps->mean_of_gaps) : json(nullptr)},
              {"gap_ratio_of_mean_lengths",
               s.gaps ? json(s.gaps->ratio_of_mean_lengths) : json(nullptr)}};
}

std::string histogram_to_csv(std::span<const HistogramBin> bins) {
  std::string out = "bin_left,bin_right,count\n";
  for (const auto& b : bins) {
    out += format_double(b.left) + ',' + format_double(b.right) + ',' + std::to_string(b.count) + '\n';
  }
  return out;
}

PipelineReport run_pipeline(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::uint64_t master = cfg.generator.master_seed;
  const std::vector<Instance> instances =
      cfg.sweep ? gen_parallel_sweep(std::get<ParallelConfig>(cfg.generator.family), cfg.count,
                                     master, cfg.jobs)
                : gen_batch(cfg.generator, cfg.count, cfg.jobs);

  const std::uint64_t solver_seed = stream_seed(master, kSolverStream);
  const std::uint64_t reference_seed = stream_seed(master, kReferenceStream);
  const std::string family(family_name(cfg.generator.family));

  PipelineReport report;
  report.config = cfg;
  report.rows.resize(instances.size());
  parallel_for(instances.size(), cfg.jobs, [&](std::size_t i) {
    const Instance& inst = instances[i];
    InstanceRow& row = report.rows[i];
    row.name = inst.name;
    row.n = inst.size();
    row.family = family;
    row.seed = inst.provenance ? inst.provenance->seed : 0;
    try {
      SolveConfig sc = cfg.solver;
      sc.seed = sub_seed(solver_seed, i);
      const Tour tour = solve(inst, sc);
      row.tour_len = tour.length;
      std::vector<NodeId> scored = tour.order;
      if (cfg.reference) {
        SolveConfig rc = cfg.solver;
        rc.algorithm = *cfg.reference;
        rc.seed = sub_seed(reference_seed, i);
        const Tour ref = solve(inst, rc);
        row.opt_len = ref.length;
        row.gap = optimality_gap(tour.length, ref.length);
        scored = ref.order;
      }
      const DensityReport d = rho(inst, scored, cfg.density);
      row.rho = d.rho;
      row.tie_count = d.tie_count;
    } catch (const std::exception& e) {
      row.tour_len.reset();
      row.opt_len.reset();
      row.gap.reset();
      row.error = error_text(e);
    }
  });
  report.summary = summarize_rows(report.rows, cfg.defect_threshold, cfg.histogram_bins);
  return report;
}

void write_report(const PipelineReport& report, const std::filesystem::path& dir) {
  write_file(dir / "instances.csv", rows_to_csv(report.rows));
  write_file(dir / "summary.json", summary_to_json(report.summary, report.config).dump(2) + "\n");
  write_file(dir / "histogram.csv", histogram_to_csv(report.summary.histogram));
}

std::string match_key(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  return name.substr(0, name.find('.'));
}

std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::map<std::string, std::filesystem::path> index_by_key(const std::filesystem::path& dir) {
  std::map<std::string, std::filesystem::path> out;
  for (const auto& p : list_files(dir)) {
    const auto [it, inserted] = out.emplace(match_key(p), p);
    if (!inserted) {
      throw Error(ErrorCode::kInvalidInput, "files " + it->second.filename().string() + " and " +
                                                p.filename().string() + " share the name '" +
                                                it->first + "'");
    }
  }
  return out;
}

}  // namespace

std::vector<FilePair> pair_files(const std::filesystem::path& instances_dir,
                                 const std::filesystem::path& tours_dir) {
  const auto instances = index_by_key(instances_dir);
  const auto tours = index_by_key(tours_dir);
  std::vector<FilePair> out;
  for (const auto& [key, path] : instances) {
    const auto it = tours.find(key);
    if (it == tours.end()) {
      throw Error(ErrorCode::kInvalidInput,
                  "no tour in " + tours_dir.string() + " for instance file " + path.filename().string());
    }
    out.push_back({path, it->second});
  }
  for (const auto& [key, path] : tours) {
    if (!instances.count(key)) {
      throw Error(ErrorCode::kInvalidInput, "tour file " + path.filename().string() +
                                                " matches no instance in " + instances_dir.string());
    }
  }
  return out;
}

EvalReport evaluate_external_tours(const std::filesystem::path& instances_dir,
                                   const std::filesystem::path& tours_dir,
                                   const std::filesystem::path& reference_dir, double threshold,
                                   const DensityOptions& density, int bins) {
  defect_rate(std::vector<double>{0.0}, threshold);  // validates the threshold
  const auto tours = index_by_key(tours_dir);
  const auto refs = index_by_key(reference_dir);

  EvalReport report;
  report.threshold = threshold;
  std::vector<double> gaps, rhos, lens, ref_lens;
  for (const auto& path : list_files(instances_dir)) {
    EvalRow row;
    row.name = match_key(path);
    try {
      const Instance inst = load_instance(path);
      const auto t = tours.find(row.name);
      if (t == tours.end()) throw Error(ErrorCode::kInvalidInput, "missing candidate tour");
      const auto r = refs.find(row.name);
      if (r == refs.end()) throw Error(ErrorCode::kInvalidInput, "missing reference tour");
      const auto order = load_tour(t->second, inst.size());
      const auto ref_order = load_tour(r->second, inst.size());
      row.tour_len = tour_length(inst, order);
      row.ref_len = tour_length(inst, ref_order);
      row.gap = optimality_gap(*row.tour_len, *row.ref_len);
      row.rho = rho(inst, ref_order, density).rho;
      gaps.push_back(*row.gap);
      rhos.push_back(*row.rho);
      lens.push_back(*row.tour_len);
      ref_lens.push_back(*row.ref_len);
    } catch (const std::exception& e) {
      row.tour_len.reset();
      row.ref_len.reset();
      row.gap.reset();
      row.rho.reset();
      row.error = error_text(e);
    }
    report.rows.push_back(std::move(row));
  }
  report.evaluated = gaps.size();
  if (!gaps.empty()) {
    report.defect_rate = defect_rate(gaps, threshold);
    report.gaps = summarize_gaps(lens, ref_lens);
    report.by_rho = defect_by_rho(rhos, gaps, threshold, bins);
  }
  return report;
}

std::string eval_rows_to_csv(std::span<const EvalRow> rows) {
  std::string out = "name,tour_len,ref_len,gap,rho,error\n";
  for (const auto& r : rows) {
    out += r.name + ',' + opt_num(r.tour_len) + ',' + opt_num(r.ref_len) + ',' + opt_num(r.gap) +
           ',' + opt_num(r.rho) + ',' + csv_field(r.error) + '\n';
  }
  return out;
}

std::string defect_bins_to_csv(std::span<const DefectBin> bins) {
  std::string out = "rho_low,rho_high,count,defects,defect_rate,mean_gap\n";
  for (const auto& b : bins) {
    out += format_double(b.rho_low) + ',' + format_double(b.rho_high) + ',' +
           std::to_string(b.count) + ',' + std::to_string(b.defects) + ',' +
           format_double(b.rate) + ',' + format_double(b.mean_gap) + '\n';
  }
  return out;
}

json eval_to_json(const EvalReport& report) {
  json bins = json::array();
  for (const auto& b : report.by_rho) {
    bins.push_back({{"rho_low", b.rho_low},
                    {"rho_high", b.rho_high},
                    {"count", b.count},
                    {"defects", b.defects},
                    {"defect_rate", b.rate},
                    {"mean_gap", b.mean_gap}});
  }
  return json{{"instances", report.rows.size()},
              {"evaluated", report.evaluated},
              {"failed", report.rows.size() - report.evaluated},
              {"threshold", report.threshold},
              {"defect_rate", opt_json(report.defect_rate)},
              {"gap_mean_of_gaps", report.gaps ? json(report.gaps->mean_of_gaps) : json(nullptr)},
              {"gap_ratio_of_mean_lengths",
               report.gaps ? json(report.gaps->ratio_of_mean_lengths) : json(nullptr)},
              {"defect_by_rho", bins}};
}

std::vector<std::pair<NodeId, NodeId>> uncovered_nn_edges(const Instance& instance,
                                                          std::span<const NodeId> order,
                                                          const NeighborSets& sets) {
  const int n = instance.size();
  if (sets.size() != n || static_cast<int>(order.size()) != n) {
    throw Error(ErrorCode::kInvalidInput, "tour, neighbour sets and instance sizes differ");
  }
  check_permutation(order, n);
  const auto adjacent = tour_neighbors(order);
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId i = 0; i < n; ++i) {
    const auto [pred, succ] = adjacent[static_cast<std::size_t>(i)];
    for (NodeId j : sets.sets[static_cast<std::size_t>(i)]) {
      if (j != pred && j != succ) out.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string render_overlay(const Instance& instance, std::span<const NodeId> order,
                           const NeighborSets& sets) {
  const auto uncovered = uncovered_nn_edges(instance, order, sets);
  double min_x = instance.nodes[0].x, max_x = min_x, min_y = instance.nodes[0].y, max_y = min_y;
  for (const auto& p : instance.nodes) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double span = std::max(max_x - min_x, max_y - min_y);
  if (!(span > 0.0)) span = 1.0;
  const double pad = 0.05 * span;
  const double scale = 800.0 / (span + 2.0 * pad);
  const double width = (max_x - min_x + 2.0 * pad) * scale;
  const double height = (max_y - min_y + 2.0 * pad) * scale;
  // SVG y grows downwards; flip so the picture matches the coordinates.
  const auto sx = [&](double x) { return fmt((x - min_x + pad) * scale, 2); };
  const auto sy = [&](double y) { return fmt((max_y - y + pad) * scale, 2); };
  const auto line = [&](NodeId a, NodeId b, const char* cls) {
    const auto& p = instance.nodes[static_cast<std::size_t>(a)];
    const auto& q = instance.nodes[static_cast<std::size_t>(b)];
    return "<line class=\"" + std::string(cls) + "\" x1=\"" + sx(p.x) + "\" y1=\"" + sy(p.y) +
           "\" x2=\"" + sx(q.x) + "\" y2=\"" + sy(q.y) + "\"/>\n";
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(width, 2) + " " +
         fmt(height, 2) + "\" width=\"" + fmt(width, 2) + "\" height=\"" + fmt(height, 2) + "\">\n";
  out += "<style>.tour{stroke:#2b5d8a;stroke-width:1.5;fill:none}"
         ".nn-uncovered{stroke:#d62728;stroke-width:2.5;fill:none}"
         ".node{fill:#111}</style>\n";
  out += "<title>" + instance.name + "</title>\n";
  const std::size_t n = order.size();
  for (std::size_t k = 0; k < n; ++k) out += line(order[k], order[(k + 1) % n], "tour");
  for (const auto& [a, b] : uncovered) out += line(a, b, "nn-uncovered");
  for (const auto& p : instance.nodes) {
    out += "<circle class=\"node\" cx=\"" + sx(p.x) + "\" cy=\"" + sy(p.y) + "\" r=\"3\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

Calibration calibrate_scale_free(const ScaleFreeConfig& base, std::span<const double> ks,
                                 std::size_t count, double target, std::uint64_t master_seed,
                                 const SolveConfig& solver, int jobs) {
  if (ks.empty()) throw Error(ErrorCode::kInvalidConfig, "calibration needs at least one k");
  Calibration out;
  out.target = target;
  double best = std::numeric_limits<double>::infinity();
  for (double k : ks) {
    ExperimentConfig cfg;
    ScaleFreeConfig sf = base;
    sf.k_attract = k;
    cfg.generator = {sf, master_seed};
    cfg.count = count;
    cfg.solver = solver;
    cfg.jobs = jobs;
    const PipelineReport report = run_pipeline(cfg);
    if (report.summary.completed != report.summary.count) {
      throw Error(ErrorCode::kInvalidInput, "calibration run failed for k = " + format_double(k));
    }
    out.rows.push_back({k, report.summary.rho_mean, report.summary.rho_sd});
    const double miss = std::fabs(report.summary.rho_mean - target);
    if (miss < best || (miss == best && k < out.best_k)) {
      best = miss;
      out.best_k = k;
    }
  }
  return out;
}

}  // namespace nnd
