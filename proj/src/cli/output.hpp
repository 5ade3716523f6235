#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "semieff/measure.hpp"

namespace semieff::cli {

using nlohmann::json;

json to_json(const Vec& v);
json to_json(const Mat& m);
json to_json(const std::vector<Vec>& vs);

/// RFC-4180 table: comma separated, CRLF line ends, doubles with 17 significant digits.
class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<Cell> row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Row-major dump of a matrix with header i,j,value (0-based indices).
CsvTable matrix_table(const Mat& m);

/// Writes to a temporary file in the same directory and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace semieff::cli
