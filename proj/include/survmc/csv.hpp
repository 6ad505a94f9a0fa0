#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace survmc {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t column(const std::string& name) const;  // throws if absent
  bool has_column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string format_number(double x);

}  // namespace survmc
