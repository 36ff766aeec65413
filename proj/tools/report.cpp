#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <fmt/format.h>

#include "ipmdro/error.hpp"

namespace ipmdro::cli {
namespace {

using json = nlohmann::ordered_json;

void dump(const json& value, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (value.type()) {
    case json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        dump(item, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& item : value) flat = flat && !item.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i > 0) out += ", ";
          dump(value[i], depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i > 0) out += ",\n";
        out += pad;
        dump(value[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = value.get<double>();
      out += std::isfinite(v) ? format_number(v) : "\"" + format_number(v) + "\"";
      return;
    }
    default:
      out += value.dump();
  }
}

std::string csv_cell(const Report::Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string quoted = "\"";
          for (char c : v) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
          return quoted + "\"";
        }
      },
      cell);
}

json cell_json(const Report::Cell& cell) {
  return std::visit([](const auto& v) { return json(v); }, cell);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) raise(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string dump_json(const json& value) {
  std::string out;
  dump(value, 0, out);
  out += "\n";
  return out;
}

Report::Report(std::string subcommand, std::vector<std::string> columns)
    : subcommand_(std::move(subcommand)), columns_(std::move(columns)) {}

void Report::set_meta(const std::string& key, json value) { meta_[key] = std::move(value); }

void Report::add_row(std::vector<Cell> cells, json detail) {
  require(cells.size() == columns_.size(), ErrorCode::InvalidArgument,
          fmt::format("report row has {} cells, expected {}", cells.size(), columns_.size()));
  rows_.push_back(std::move(cells));
  details_.push_back(std::move(detail));
}

std::string Report::csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); ++c) out += (c > 0 ? "," : "") + columns_[c];
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c > 0 ? "," : "") + csv_cell(row[c]);
    out += "\n";
  }
  return out;
}

std::string Report::json_text() const {
  json doc;
  doc["subcommand"] = subcommand_;
  doc["meta"] = meta_;
  doc["columns"] = columns_;
  json rows = json::array();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    json row = json::object();
    for (std::size_t c = 0; c < columns_.size(); ++c) row[columns_[c]] = cell_json(rows_[r][c]);
    if (!details_[r].is_null()) row["detail"] = details_[r];
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return dump_json(doc);
}

void Report::write(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create output directory " + dir.string());
  write_file(dir / (subcommand_ + ".csv"), csv());
  write_file(dir / (subcommand_ + ".json"), json_text());
}

}  // namespace ipmdro::cli
