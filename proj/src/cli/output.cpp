#include <fmt/format.h>

#include <cmath>
#include <json.hpp>

#include "padic/cli.hpp"

namespace padic::cli {

namespace {

using nlohmann::ordered_json;

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return csv_escape(v);
        else return std::to_string(v);
      },
      cell);
}

// Non-finite doubles have no JSON literal; they are emitted as strings.
ordered_json json_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_double(v);
          return v;
        } else {
          return v;
        }
      },
      cell);
}

std::string render_csv(const Report& r) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  std::vector<std::string> header;
  for (const auto& c : r.columns) header.push_back(csv_escape(c));
  line(header);
  for (const auto& row : r.rows) {
    std::vector<std::string> fields;
    for (const auto& c : row) fields.push_back(csv_cell(c));
    line(fields);
  }
  if (!r.verdicts.empty()) {
    out += '\n';
    line({"verdict", "statistic", "threshold", "pass", "details"});
    for (const auto& v : r.verdicts)
      line({csv_escape(v.name), format_double(v.statistic), format_double(v.threshold),
            v.pass ? "true" : "false", csv_escape(v.details)});
  }
  return out;
}

std::string render_json(const Report& r) {
  ordered_json config = ordered_json::object();
  config["command"] = r.command;
  for (const auto& [key, value] : r.config) config[key] = json_cell(value);

  ordered_json results = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json rec = ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i)
      rec[r.columns[i]] = json_cell(row[i]);
    results.push_back(std::move(rec));
  }

  ordered_json verdicts = ordered_json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back({{"name", v.name},
                        {"statistic", json_cell(v.statistic)},
                        {"threshold", json_cell(v.threshold)},
                        {"pass", v.pass},
                        {"details", v.details}});

  ordered_json doc = {{"config", config}, {"results", results}, {"verdicts", verdicts}};
  return doc.dump(2) + "\n";
}

}  // namespace

bool Report::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string render(const Report& report, Format format) {
  return format == Format::json ? render_json(report) : render_csv(report);
}

}  // namespace padic::cli
