#ifndef REDBENCH_DAT_IO_HPP
#define REDBENCH_DAT_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace redbench {

/// Column-oriented numeric table as written to .dat files:
///
///   # <comment lines>
///   # columns: name1 name2 ...
///   v11 v12 ...
///
/// Values are whitespace separated, one row per line.
struct DatTable {
  std::vector<std::string> comments;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Index of the named column; throws std::out_of_range if absent.
  std::size_t column_index(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const {
    return columns[column_index(name)];
  }
};

/// Shortest round-tripping-enough decimal used across all text outputs ("%.10g").
std::string format_number(double v);

void write_dat(std::ostream& os, const DatTable& table);
void write_dat_file(const std::string& path, const DatTable& table);

/// Throws std::runtime_error with a line number on malformed input.
DatTable read_dat(std::istream& is);
DatTable read_dat_file(const std::string& path);

}  // namespace redbench

#endif  // REDBENCH_DAT_IO_HPP
