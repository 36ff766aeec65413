#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ipmdro::cli {

/// %.17g, with inf, -inf and nan spelled out.
std::string format_number(double value);

/// Deterministic JSON text; floating-point numbers carry 17 significant digits
/// and non-finite values are written as strings.
std::string dump_json(const nlohmann::ordered_json& value);

/// A table with one row per (instance, eps) cell plus free-form detail per row.
class Report {
 public:
  using Cell = std::variant<double, long long, std::string, bool>;

  Report(std::string subcommand, std::vector<std::string> columns);

  void set_meta(const std::string& key, nlohmann::ordered_json value);
  void add_row(std::vector<Cell> cells, nlohmann::ordered_json detail = nullptr);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
  [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
  [[nodiscard]] std::string csv() const;
  [[nodiscard]] std::string json_text() const;
  /// Writes <dir>/<subcommand>.csv and <dir>/<subcommand>.json. Throws IoError.
  void write(const std::filesystem::path& dir) const;

 private:
  std::string subcommand_;
  std::vector<std::string> columns_;
  nlohmann::ordered_json meta_ = nlohmann::ordered_json::object();
  std::vector<std::vector<Cell>> rows_;
  std::vector<nlohmann::ordered_json> details_;
};

}  // namespace ipmdro::cli
