#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace popchaos::cli {

// Empty cells (monostate) print as an empty CSV field and as JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

enum class Format { csv, json };

class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);
  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<std::string>& columns() const noexcept { return columns_; }

  // CSV: header line then one line per row. JSON: one object per row with
  // the column names as keys, in column order.
  void write(std::ostream& out, Format format) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// Shortest decimal form that round-trips, so output is byte-stable.
std::string format_number(double x);

}  // namespace popchaos::cli
