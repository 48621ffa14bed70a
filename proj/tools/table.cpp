#include "table.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"

namespace popchaos::cli {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::logic_error(fmt::format("row has {} cells for {} columns",
                                       row.size(), columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string format_number(double x) { return fmt::format("{}", x); }

namespace {

std::string csv_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(std::int64_t x) const { return fmt::format("{}", x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double x) const { return x; }
    nlohmann::ordered_json operator()(std::int64_t x) const { return x; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, cell);
}

}  // namespace

void Table::write(std::ostream& out, Format format) const {
  if (format == Format::csv) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      out << (i ? "," : "") << columns_[i];
    }
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << csv_cell(row[i]);
      }
      out << '\n';
    }
    return;
  }
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[columns_[i]] = json_cell(row[i]);
    }
    out << obj.dump() << '\n';
  }
}

}  // namespace popchaos::cli
