#include "table.hpp"

#include <cmath>
#include <ostream>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"
#include "popsim/errors.hpp"

#ifndef POPSIM_VERSION
#define POPSIM_VERSION "0.0.0"
#endif

namespace popsim::cli {

std::string tool_id() { return std::string("popsim ") + POPSIM_VERSION; }

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "gnuplot") return Format::Gnuplot;
  throw UsageError(fmt::format("unknown format '{}' (expected csv, json or gnuplot)", name));
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error(fmt::format("table {}: row has {} cells, expected {}", schema,
                                       row.size(), columns.size()));
  }
  rows.push_back(std::move(row));
}

namespace {

std::string render(const Cell& cell, const char* missing) {
  return std::visit(
      [missing](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return missing;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "1" : "0";
        } else if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? fmt::format("{}", v) : std::string(missing);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return fmt::format("{}", v);
        }
      },
      cell);
}

nlohmann::ordered_json to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
        } else {
          return v;
        }
      },
      cell);
}

}  // namespace

void Table::write(std::ostream& out, Format format) const {
  switch (format) {
    case Format::Csv: {
      fmt::print(out, "# schema={} tool={}\n", schema, tool_id());
      for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
      out << '\n';
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << render(row[c], "");
        out << '\n';
      }
      break;
    }
    case Format::Gnuplot: {
      fmt::print(out, "# schema={} tool={}\n#", schema, tool_id());
      for (const auto& col : columns) out << ' ' << col;
      out << '\n';
      for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << render(row[c], "NaN");
        out << '\n';
      }
      break;
    }
    case Format::Json: {
      nlohmann::ordered_json doc;
      doc["schema"] = schema;
      doc["tool"] = tool_id();
      auto& array = doc["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) obj[columns[c]] = to_json(row[c]);
        array.push_back(std::move(obj));
      }
      out << doc.dump(2) << '\n';
      break;
    }
  }
}

}  // namespace popsim::cli
