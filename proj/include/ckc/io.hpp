#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "ckc/constraints.hpp"
#include "ckc/core.hpp"
#include "ckc/datagen.hpp"
#include "ckc/error.hpp"
#include "ckc/eval.hpp"
#include "ckc/solution.hpp"

namespace ckc::io {

using nlohmann::json;

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip text for a double, independent of the locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InputError("line " + std::to_string(line) + ": '" + std::string(text) +
                     "' is not a number");
  }
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

struct CsvOptions {
  bool header = false;
  std::optional<long> label_column;  // negative counts from the end
};

struct LabeledData {
  Dataset dataset;
  std::vector<std::int64_t> labels;  // empty without a label column
};

inline LabeledData parse_dataset_csv(std::string_view text, const CsvOptions& opts = {},
                                     std::size_t cache_limit = kDefaultCacheLimit) {
  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> labels;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (opts.header && line_no == 1) continue;
    std::vector<double> row;
    std::size_t at = 0;
    for (;;) {
      const std::size_t comma = line.find(',', at);
      row.push_back(parse_number(line.substr(at, comma - at), line_no));
      if (comma == std::string_view::npos) break;
      at = comma + 1;
    }
    if (opts.label_column) {
      const long width = static_cast<long>(row.size());
      const long col = *opts.label_column < 0 ? width + *opts.label_column : *opts.label_column;
      if (col < 0 || col >= width) {
        throw InputError("line " + std::to_string(line_no) + ": no label column " +
                         std::to_string(*opts.label_column));
      }
      const double v = row[static_cast<std::size_t>(col)];
      if (v != static_cast<double>(static_cast<std::int64_t>(v))) {
        throw InputError("line " + std::to_string(line_no) + ": label is not an integer");
      }
      labels.push_back(static_cast<std::int64_t>(v));
      row.erase(row.begin() + col);
    }
    rows.push_back(std::move(row));
  }
  return LabeledData{Dataset::from_rows(rows, cache_limit), std::move(labels)};
}

inline LabeledData read_dataset_csv(const std::string& path, const CsvOptions& opts = {},
                                    std::size_t cache_limit = kDefaultCacheLimit) {
  return parse_dataset_csv(read_file(path), opts, cache_limit);
}

inline std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  for (PointId p = 0; p < data.size(); ++p) {
    const auto c = data.coords(p);
    for (std::size_t d = 0; d < c.size(); ++d) {
      if (d) out += ',';
      out += format_number(c[d]);
    }
    out += '\n';
  }
  return out;
}

struct ConstraintFile {
  std::vector<std::vector<PointId>> ml;
  CLCollection cl;
};

inline std::vector<std::vector<std::size_t>> id_sets_from_json(const json& j, const char* key) {
  if (!j.is_array()) throw InputError(std::string(key) + " must be an array of id lists");
  std::vector<std::vector<std::size_t>> sets;
  for (const auto& row : j) {
    if (!row.is_array()) throw InputError(std::string(key) + " entries must be arrays");
    auto& set = sets.emplace_back();
    for (const auto& id : row) {
      if (!id.is_number_unsigned()) {
        throw InputError(std::string(key) + " ids must be non-negative integers, got " + id.dump());
      }
      set.push_back(id.get<std::size_t>());
    }
  }
  return sets;
}

inline ConstraintFile constraints_from_json(const json& j) {
  ConstraintFile out;
  try {
    if (!j.is_object()) throw InputError("constraints must be a JSON object");
    if (j.contains("ml")) out.ml = id_sets_from_json(j.at("ml"), "ml");
    if (j.contains("cl")) out.cl.sets = id_sets_from_json(j.at("cl"), "cl");
    const std::string mode = j.value("mode", std::string("disjoint"));
    if (mode == "disjoint") {
      out.cl.mode = CLMode::disjoint;
    } else if (mode == "intersected") {
      out.cl.mode = CLMode::intersected;
    } else {
      throw InputError("unknown constraint mode '" + mode + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("constraints: ") + e.what());
  }
  return out;
}

inline json constraints_to_json(const std::vector<std::vector<PointId>>& ml,
                                const CLCollection& cl) {
  return json{{"ml", ml},
              {"cl", cl.sets},
              {"mode", cl.mode == CLMode::intersected ? "intersected" : "disjoint"}};
}

inline json metrics_to_json(const MetricsReport& m) {
  json j{{"cost", m.cost}, {"purity", m.purity}, {"nmi", m.nmi}, {"ri", m.ri}};
  if (m.ratio) j["ratio"] = *m.ratio;
  return j;
}

inline json solution_to_json(const ClusteringSolution& sol,
                             const std::optional<MetricsReport>& metrics = std::nullopt) {
  json centers = json::array();
  for (const auto& c : sol.centers) {
    centers.push_back(
        {{"entity", c.entity}, {"representative", c.representative}, {"members", c.members}});
  }
  json trace = json::array();
  for (const auto& t : sol.trace) {
    trace.push_back({{"r", t.r}, {"feasible", t.feasible}, {"centers", t.centers}});
  }
  json j{{"k", sol.k},
         {"chosen_r", sol.chosen_r},
         {"threshold", sol.threshold},
         {"realized_radius", sol.realized_radius},
         {"centers", centers},
         {"assignment", sol.assignment},
         {"violations", sol.violations},
         {"trace", trace}};
  if (sol.audit) {
    json scan = json::array();
    for (const auto& t : sol.audit->scan) {
      scan.push_back({{"r", t.r}, {"feasible", t.feasible}, {"centers", t.centers}});
    }
    j["audit"] = {{"monotone", sol.audit->monotone}, {"scan", scan}};
  }
  if (!sol.rds_dump.empty()) {
    json dump = json::array();
    for (const auto& ev : sol.rds_dump) {
      json edges = json::array();
      for (std::size_t y = 0; y < ev.graph.left.size(); ++y) {
        for (std::size_t z : ev.graph.adjacency[y]) {
          edges.push_back({ev.graph.left[y], ev.graph.right[z]});
        }
      }
      json matched = json::array();
      for (auto [y, z] : ev.matching.pairs()) matched.push_back({ev.graph.left[y], ev.graph.right[z]});
      json entry{{"y", ev.graph.left},
                 {"c", ev.graph.right},
                 {"threshold", ev.graph.threshold},
                 {"edges", edges},
                 {"matching", matched},
                 {"rds", nullptr}};
      if (ev.rds) {
        std::vector<std::size_t> yp, cp;
        for (std::size_t y : ev.rds->y_prime) yp.push_back(ev.graph.left[y]);
        for (std::size_t z : ev.rds->c_prime) cp.push_back(ev.graph.right[z]);
        entry["rds"] = {{"y_prime", yp}, {"c_prime", cp}, {"value", ev.rds->value}};
      }
      dump.push_back(std::move(entry));
    }
    j["rds_dump"] = std::move(dump);
  }
  if (metrics) j["metrics"] = metrics_to_json(*metrics);
  return j;
}

inline json truth_to_json(const PlantedInstance& inst) {
  return json{{"r_star", inst.r_star},
              {"labels", inst.truth_labels},
              {"latent_centers", inst.cluster_centers}};
}

struct Truth {
  double r_star = 0.0;
  std::vector<std::int64_t> labels;
};

inline Truth truth_from_json(const json& j) {
  try {
    return Truth{j.at("r_star").get<double>(), j.at("labels").get<std::vector<std::int64_t>>()};
  } catch (const json::exception& e) {
    throw InputError(std::string("truth file: ") + e.what());
  }
}

/// Writes pretty JSON with a trailing newline.
inline void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

}  // namespace ckc::io
