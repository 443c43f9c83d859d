#include <string>

#include "nnd/error.hpp"
#include "nnd/tsplib_io.hpp"

namespace nnd {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <typename T>
void read_opt(const json& params, const char* key, T& field) {
  if (auto it = params.find(key); it != params.end()) field = it->get<T>();
}

}  // namespace

json family_to_json(const FamilyConfig& family) {
  return std::visit(
      overloaded{
          [](const RueConfig& c) { return json{{"n", c.n}}; },
          [](const RneConfig& c) { return json{{"n", c.n}, {"mean", c.mean}, {"sd", c.sd}}; },
          [](const ScaleFreeConfig& c) {
            return json{{"n", c.n},
                        {"m0", c.m0},
                        {"m", c.m},
                        {"k_attract", c.k_attract},
                        {"layout", to_string(c.layout)},
                        {"layout_iterations", c.layout_iterations},
                        {"layout_tolerance", c.layout_tolerance}};
          },
          [](const ParallelConfig& c) {
            return json{{"n", c.n},
                        {"line_gap", c.line_gap},
                        {"alpha", c.alpha},
                        {"sigma_large", c.sigma_large},
                        {"sigma_small", c.sigma_small},
                        {"rotate", c.rotate},
                        {"rescale", c.rescale}};
          },
          [](const ConvolutionConfig& c) {
            return json{{"n", c.n}, {"lambda_max", c.lambda_max}};
          },
      },
      family);
}

FamilyConfig family_from_json(std::string_view family, const json& params) {
  if (family == "rue") {
    RueConfig c;
    read_opt(params, "n", c.n);
    return c;
  }
  if (family == "rne") {
    RneConfig c;
    read_opt(params, "n", c.n);
    read_opt(params, "mean", c.mean);
    read_opt(params, "sd", c.sd);
    return c;
  }
  if (family == "scale-free") {
    ScaleFreeConfig c;
    read_opt(params, "n", c.n);
    read_opt(params, "m0", c.m0);
    read_opt(params, "m", c.m);
    read_opt(params, "k_attract", c.k_attract);
    if (auto it = params.find("layout"); it != params.end()) {
      c.layout = parse_layout_method(it->get<std::string>());
    }
    read_opt(params, "layout_iterations", c.layout_iterations);
    read_opt(params, "layout_tolerance", c.layout_tolerance);
    return c;
  }
  if (family == "parallel") {
    ParallelConfig c;
    read_opt(params, "n", c.n);
    read_opt(params, "line_gap", c.line_gap);
    read_opt(params, "alpha", c.alpha);
    read_opt(params, "sigma_large", c.sigma_large);
    read_opt(params, "sigma_small", c.sigma_small);
    read_opt(params, "rotate", c.rotate);
    read_opt(params, "rescale", c.rescale);
    return c;
  }
  if (family == "convolution") {
    ConvolutionConfig c;
    read_opt(params, "n", c.n);
    read_opt(params, "lambda_max", c.lambda_max);
    return c;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown family '" + std::string(family) + "'");
}

json instance_to_json(const Instance& instance) {
  json coords = json::array();
  for (const auto& p : instance.nodes) coords.push_back(json::array({p.x, p.y}));
  json j{{"name", instance.name},
         {"n", instance.nodes.size()},
         {"metric", std::string(to_string(instance.metric))},
         {"coords", std::move(coords)}};
  if (instance.provenance) {
    const auto& pv = *instance.provenance;
    j["provenance"] = json{{"family", std::string(family_name(pv.config.family))},
                           {"params", family_to_json(pv.config.family)},
                           {"seed", pv.seed},
                           {"master_seed", pv.config.master_seed},
                           {"index", pv.index}};
  }
  return j;
}

Instance instance_from_json(const json& j) {
  std::vector<Point> nodes;
  for (const auto& c : j.at("coords")) {
    if (!c.is_array() || c.size() != 2) {
      throw Error(ErrorCode::kParse, "coords entries must be [x, y] pairs");
    }
    nodes.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  if (auto it = j.find("n"); it != j.end() && it->get<std::size_t>() != nodes.size()) {
    throw Error(ErrorCode::kParse, "n = " + std::to_string(it->get<std::size_t>()) +
                                       " but " + std::to_string(nodes.size()) +
                                       " coordinates given");
  }
  const Metric metric =
      j.contains("metric") ? parse_metric(j.at("metric").get<std::string>()) : Metric::kExact;
  std::optional<Provenance> provenance;
  if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
    Provenance pv;
    pv.config.family = family_from_json(it->at("family").get<std::string>(),
                                        it->value("params", json::object()));
    pv.seed = it->at("seed").get<std::uint64_t>();
    pv.config.master_seed = it->value("master_seed", std::uint64_t{0});
    pv.index = it->value("index", std::uint64_t{0});
    provenance = pv;
  }
  return Instance(j.value("name", std::string("unnamed")), std::move(nodes), metric,
                  std::move(provenance));
}

json tour_to_json(std::string_view name, const Tour& tour) {
  return json{{"name", std::string(name)},
              {"n", tour.order.size()},
              {"length", tour.length},
              {"order", tour.order}};
}

std::vector<NodeId> tour_from_json(const json& j, int n) {
  auto order = j.at("order").get<std::vector<NodeId>>();
  check_permutation(order, n);
  return order;
}

}  // namespace nnd
