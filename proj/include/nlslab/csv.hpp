#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nlslab::csv {

// 17 significant digits, scientific.
std::string format(double v);

struct Table {
  std::map<std::string, std::string> meta;  // from "# key=value" lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
  double meta_double(const std::string& key) const;
};

void write(std::ostream& os, const Table& table);
Table read(std::istream& is);

void write_file(const std::string& path, const Table& table);
Table read_file(const std::string& path);

}  // namespace nlslab::csv
