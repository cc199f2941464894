#include "redbench/dat_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace redbench {

std::size_t DatTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw std::out_of_range("no column named '" + name + "'");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_dat(std::ostream& os, const DatTable& table) {
  for (const auto& c : table.comments) os << "# " << c << '\n';
  os << "# columns:";
  for (const auto& n : table.names) os << ' ' << n;
  os << '\n';
  const std::size_t rows = table.rows();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) os << ' ';
      os << format_number(table.columns[c][r]);
    }
    os << '\n';
  }
}

void write_dat_file(const std::string& path, const DatTable& table) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dat(os, table);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

DatTable read_dat(std::istream& is) {
  DatTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      if (body.rfind("columns:", 0) == 0) {
        std::istringstream names(body.substr(8));
        t.names.clear();
        for (std::string n; names >> n;) t.names.push_back(n);
        t.columns.assign(t.names.size(), {});
      } else {
        t.comments.push_back(body);
      }
      continue;
    }
    if (t.names.empty()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": data before '# columns:' header");
    }
    std::size_t col = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": malformed number '" +
                                 line.substr(pos, end - pos) + "'");
      }
      if (col >= t.columns.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": too many columns");
      }
      t.columns[col++].push_back(v);
      pos = end;
    }
    if (col != t.columns.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(t.columns.size()) + " columns");
    }
  }
  return t;
}

DatTable read_dat_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_dat(is);
}

}  // namespace redbench
