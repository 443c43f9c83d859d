#include "nnd/tsplib_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "nnd/error.hpp"

namespace nnd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

// "KEY : VALUE", "KEY: VALUE", "KEY VALUE" or a bare "KEY".
struct KeyValue {
  std::string key;
  std::string_view value;
};

KeyValue split_keyword(std::string_view line) {
  line = trim(line);
  const auto end = line.find_first_of(" \t:");
  if (end == std::string_view::npos) return {upper(line), {}};
  std::string_view rest = trim(line.substr(end));
  if (!rest.empty() && rest.front() == ':') rest = trim(rest.substr(1));
  return {upper(line.substr(0, end)), rest};
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool starts_numeric(std::string_view line) {
  const auto t = trim(line);
  if (t.empty()) return false;
  const char c = t.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

std::vector<std::string> split_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorCode::kInvalidInput, "cannot format number");
  return std::string(buf, ptr);
}

TsplibHeader parse_header(std::string_view text) {
  TsplibHeader h;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto kv = split_keyword(line);
    if (kv.key == "NODE_COORD_SECTION" || kv.key == "EOF") break;
    if (kv.key == "NAME") {
      h.name = std::string(kv.value);
    } else if (kv.key == "TYPE") {
      h.type = upper(kv.value);
    } else if (kv.key == "DIMENSION") {
      if (!parse_number(kv.value, h.dimension) || h.dimension <= 0) {
        throw ParseError(line_no, "invalid DIMENSION '" + std::string(kv.value) + "'");
      }
    } else if (kv.key == "EDGE_WEIGHT_TYPE") {
      h.edge_weight_type = upper(kv.value);
    }
  }
  return h;
}

Instance parse_instance(std::istream& in) {
  const auto lines = split_lines(in);
  TsplibHeader h;
  bool have_dimension = false;
  std::size_t section_line = 0;

  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto kv = split_keyword(lines[i]);
    if (kv.key == "NODE_COORD_SECTION") {
      section_line = line_no;
      ++i;
      break;
    }
    if (kv.key == "EOF") break;
    if (kv.key == "NAME") {
      h.name = std::string(kv.value);
    } else if (kv.key == "TYPE") {
      h.type = upper(kv.value);
      if (h.type != "TSP") {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "line " + std::to_string(line_no) + ": unsupported TYPE '" +
                        std::string(kv.value) + "' (only TSP)");
      }
    } else if (kv.key == "DIMENSION") {
      if (!parse_number(kv.value, h.dimension) || h.dimension <= 0) {
        throw ParseError(line_no, "invalid DIMENSION '" + std::string(kv.value) + "'");
      }
      have_dimension = true;
    } else if (kv.key == "EDGE_WEIGHT_TYPE") {
      h.edge_weight_type = upper(kv.value);
      if (h.edge_weight_type != "EUC_2D") {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "line " + std::to_string(line_no) + ": unsupported EDGE_WEIGHT_TYPE '" +
                        std::string(kv.value) + "' (only EUC_2D)");
      }
    } else if (kv.key == "EDGE_WEIGHT_SECTION" || kv.key == "DISPLAY_DATA_SECTION" ||
               kv.key == "EDGE_DATA_SECTION") {
      throw Error(ErrorCode::kUnsupportedFormat,
                  "line " + std::to_string(line_no) + ": unsupported section " + kv.key);
    }
    // Other keywords (COMMENT, DISPLAY_DATA_TYPE, ...) are ignored.
  }

  if (section_line == 0) throw ParseError(0, "missing NODE_COORD_SECTION");
  if (!have_dimension) throw ParseError(section_line, "NODE_COORD_SECTION before DIMENSION");
  if (h.edge_weight_type.empty()) {
    throw ParseError(section_line, "missing EDGE_WEIGHT_TYPE");
  }

  const auto n = static_cast<std::size_t>(h.dimension);
  std::vector<Point> nodes(n);
  std::vector<char> filled(n, 0);
  std::size_t count = 0;
  std::size_t end_line = lines.size() + 1;
  for (; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (!starts_numeric(line)) {
      end_line = line_no;
      break;
    }
    const auto tok = tokens(line);
    long id = 0;
    Point p;
    if (tok.size() != 3 || !parse_number(tok[0], id) || !parse_number(tok[1], p.x) ||
        !parse_number(tok[2], p.y)) {
      throw ParseError(line_no, "malformed coordinate line '" + std::string(line) + "'");
    }
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ParseError(line_no, "non-finite coordinate");
    }
    if (id < 1 || static_cast<std::size_t>(id) > n) {
      throw ParseError(line_no, "node id " + std::to_string(id) + " outside 1.." +
                                    std::to_string(n));
    }
    const auto idx = static_cast<std::size_t>(id - 1);
    if (filled[idx]) throw ParseError(line_no, "node id " + std::to_string(id) + " repeated");
    filled[idx] = 1;
    nodes[idx] = p;
    ++count;
  }
  if (count != n) {
    throw ParseError(end_line <= lines.size() ? end_line : lines.size(),
                     "DIMENSION is " + std::to_string(n) + " but " + std::to_string(count) +
                         " coordinate lines were read");
  }
  std::string name = h.name.empty() ? "unnamed" : h.name;
  return Instance(std::move(name), std::move(nodes), Metric::kTsplib);
}

Instance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

std::string write_instance(const Instance& instance) {
  std::string out;
  out += "NAME: " + (instance.name.empty() ? std::string("unnamed") : instance.name) + "\n";
  out += "TYPE: TSP\n";
  out += "DIMENSION: " + std::to_string(instance.nodes.size()) + "\n";
  out += "EDGE_WEIGHT_TYPE: EUC_2D\n";
  out += "NODE_COORD_SECTION\n";
  for (std::size_t i = 0; i < instance.nodes.size(); ++i) {
    out += std::to_string(i + 1);
    out += ' ';
    out += format_double(instance.nodes[i].x);
    out += ' ';
    out += format_double(instance.nodes[i].y);
    out += '\n';
  }
  out += "EOF\n";
  return out;
}

std::vector<NodeId> parse_tour(std::istream& in, int n) {
  const auto lines = split_lines(in);
  bool has_section = false;
  for (const auto& l : lines) {
    if (split_keyword(l).key == "TOUR_SECTION") {
      has_section = true;
      break;
    }
  }

  std::vector<long> raw;
  bool in_body = !has_section;
  bool done = false;
  for (std::size_t i = 0; i < lines.size() && !done; ++i) {
    const std::size_t line_no = i + 1;
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (!in_body) {
      const auto kv = split_keyword(line);
      if (kv.key == "TOUR_SECTION") {
        in_body = true;
      } else if (kv.key == "DIMENSION") {
        int dim = 0;
        if (!parse_number(kv.value, dim)) throw ParseError(line_no, "invalid DIMENSION");
        if (dim != n) {
          throw Error(ErrorCode::kInvalidTour, "tour DIMENSION " + std::to_string(dim) +
                                                   " does not match instance size " +
                                                   std::to_string(n));
        }
      }
      continue;
    }
    if (upper(line) == "EOF") break;
    for (auto tok : tokens(line)) {
      long v = 0;
      if (!parse_number(tok, v)) {
        throw ParseError(line_no, "malformed tour entry '" + std::string(tok) + "'");
      }
      if (v == -1) {
        done = true;
        break;
      }
      raw.push_back(v);
    }
  }

  const bool zero_based =
      !has_section && std::find(raw.begin(), raw.end(), 0L) != raw.end();
  std::vector<NodeId> order;
  order.reserve(raw.size());
  for (long v : raw) {
    const long idx = zero_based ? v : v - 1;
    if (idx < 0 || idx >= n) {
      throw Error(ErrorCode::kInvalidTour,
                  "tour index " + std::to_string(v) + " out of range for n=" + std::to_string(n));
    }
    order.push_back(static_cast<NodeId>(idx));
  }
  check_permutation(order, n);
  return order;
}

std::vector<NodeId> parse_tour(std::string_view text, int n) {
  std::istringstream in{std::string(text)};
  return parse_tour(in, n);
}

std::string write_tour(std::string_view name, std::span<const NodeId> order,
                       std::optional<double> length) {
  std::string out;
  out += "NAME: " + std::string(name.empty() ? "unnamed" : name) + ".tour\n";
  if (length) out += "COMMENT: Length " + format_double(*length) + "\n";
  out += "TYPE: TOUR\n";
  out += "DIMENSION: " + std::to_string(order.size()) + "\n";
  out += "TOUR_SECTION\n";
  for (NodeId v : order) out += std::to_string(v + 1) + "\n";
  out += "-1\nEOF\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

Instance load_instance(const std::filesystem::path& path) {
  const auto text = read_file(path);
  if (path.extension() == ".json") {
    try {
      return instance_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    }
  }
  try {
    return parse_instance(std::string_view(text));
  } catch (const ParseError& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

std::vector<NodeId> load_tour(const std::filesystem::path& path, int n) {
  const auto text = read_file(path);
  if (path.extension() == ".json") {
    try {
      return tour_from_json(nlohmann::json::parse(text), n);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
    }
  }
  return parse_tour(std::string_view(text), n);
}

}  // namespace nnd
