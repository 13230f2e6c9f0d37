#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace popsim::cli {

enum class Format { Csv, Json, Gnuplot };

Format parse_format(const std::string& name);

/// One cell of tabular output; monostate renders as an empty field / null.
using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string, bool>;

/// Rows with a fixed column list and a schema id. Rendering is
/// deterministic: doubles use the shortest round-trip representation.
struct Table {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  void write(std::ostream& out, Format format) const;
};

/// "popsim <version>".
std::string tool_id();

}  // namespace popsim::cli
