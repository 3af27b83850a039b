#include "nlslab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlslab::csv {

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("csv: no column '" + name + "'");
}

double Table::meta_double(const std::string& key) const {
  auto it = meta.find(key);
  if (it == meta.end()) throw std::out_of_range("csv: no metadata key '" + key + "'");
  return std::stod(it->second);
}

void write(std::ostream& os, const Table& table) {
  for (const auto& [k, v] : table.meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format(row[i]);
    os << '\n';
  }
}

Table read(std::istream& is) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      t.meta[key] = line.substr(eq + 1);
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.columns.size()) throw std::runtime_error("csv: ragged row: " + line);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_file(const std::string& path, const Table& table) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("csv: cannot open " + path);
  write(os, table);
}

Table read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("csv: cannot open " + path);
  return read(is);
}

}  // namespace nlslab::csv
