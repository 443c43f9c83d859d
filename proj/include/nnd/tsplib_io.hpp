#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nnd/core.hpp"

namespace nnd {

struct TsplibHeader {
  std::string name;
  std::string type;
  int dimension = 0;
  std::string edge_weight_type;
};

// Reads a TSPLIB EUC_2D instance. Keywords may appear with or without a
// trailing colon. Node ids in NODE_COORD_SECTION are 1-based and must cover
// 1..DIMENSION exactly once; node i of the result is file id i+1.
Instance parse_instance(std::istream& in);
Instance parse_instance(std::string_view text);
TsplibHeader parse_header(std::string_view text);

// TSPLIB EUC_2D text. Coordinates use the shortest decimal form that reads
// back to the same double.
std::string write_instance(const Instance& instance);

// Accepts a TSPLIB .tour (TOUR_SECTION, -1 terminator) or a bare list of
// indices. TOUR_SECTION entries are 1-based. A bare list is 0-based if it
// contains 0 and 1-based otherwise.
std::vector<NodeId> parse_tour(std::istream& in, int n);
std::vector<NodeId> parse_tour(std::string_view text, int n);

std::string write_tour(std::string_view name, std::span<const NodeId> order,
                       std::optional<double> length = std::nullopt);

// Toolkit JSON: {name, n, metric, coords: [[x,y],...], provenance: {family, params, seed}}
nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);

nlohmann::json family_to_json(const FamilyConfig& family);
FamilyConfig family_from_json(std::string_view family, const nlohmann::json& params);

// {name, n, length, order: [...]} with 0-based order.
nlohmann::json tour_to_json(std::string_view name, const Tour& tour);
std::vector<NodeId> tour_from_json(const nlohmann::json& j, int n);

// Extension dispatch: ".json" uses the toolkit schema, anything else TSPLIB.
Instance load_instance(const std::filesystem::path& path);
std::vector<NodeId> load_tour(const std::filesystem::path& path, int n);

std::string read_file(const std::filesystem::path& path);
// Writes atomically enough for our purposes: truncate + write, throw on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace nnd
