#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "padic/stats.hpp"

namespace padic::cli {

inline constexpr std::uint64_t kDefaultSeed = 0x5EEDCAFE;

enum class Format { csv, json };

using Cell = std::variant<std::int64_t, double, std::string, bool>;

/// A subcommand's output: resolved configuration, one results table and the
/// verdicts that decide the exit code.
struct Report {
  std::string command;
  std::vector<std::pair<std::string, Cell>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<TestVerdict> verdicts;

  bool all_pass() const;
};

/// CSV: a header and one record per result row; when verdicts exist, a blank
/// line then a `verdict,statistic,threshold,pass,details` table.
/// JSON: {"config": {...}, "results": [{column: value}...], "verdicts": [...]}.
/// CSV doubles carry 17 significant digits; JSON uses the shortest
/// round-tripping form.
std::string render(const Report& report, Format format);

std::string format_double(double x);

/// Exit codes: 0 all verdicts pass, 1 a statistical verdict failed, 2 usage or
/// configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace padic::cli
