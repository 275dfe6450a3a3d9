#pragma once

#include "misscusum/masked_matrix.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace misscusum {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

struct CsvData {
  MaskedMatrix matrix;
  std::vector<std::string> time_labels;  // empty when the file had no header
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool is_missing_token(const std::string& cell) {
  if (cell.empty()) return true;
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower == "na" || lower == "nan";
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

}  // namespace detail

/// Reads a CSV of possibly missing numeric values. Missing cells are the
/// empty string, "NA" or "NaN" (case-insensitive). By default file rows are
/// coordinates and file columns time points; transpose flips that. With
/// header = true the first line is kept as time labels (default orientation
/// only; under transpose the labels refer to coordinates and are dropped).
inline CsvData read_csv(std::istream& in, bool transpose = false,
                        bool header = false) {
  std::vector<std::vector<std::string>> raw;
  std::vector<std::string> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && raw.empty() && labels.empty()) continue;
    auto cells = detail::split_line(line);
    if (header && labels.empty() && raw.empty()) {
      labels = std::move(cells);
      continue;
    }
    if (!raw.empty() && cells.size() != raw.front().size()) {
      throw std::invalid_argument("read_csv: ragged row at line " +
                                  std::to_string(lineno) + " (expected " +
                                  std::to_string(raw.front().size()) +
                                  " cells, got " +
                                  std::to_string(cells.size()) + ")");
    }
    raw.push_back(std::move(cells));
  }
  if (raw.empty()) {
    throw std::invalid_argument("read_csv: no data rows");
  }
  if (header && !labels.empty() && labels.size() != raw.front().size()) {
    throw std::invalid_argument("read_csv: header has " +
                                std::to_string(labels.size()) +
                                " labels but rows have " +
                                std::to_string(raw.front().size()) + " cells");
  }

  const std::size_t file_rows = raw.size();
  const std::size_t file_cols = raw.front().size();
  const Index p = static_cast<Index>(transpose ? file_cols : file_rows);
  const Index n = static_cast<Index>(transpose ? file_rows : file_cols);
  if (n < 2) {
    throw std::invalid_argument("read_csv: need at least two time points");
  }

  Matrix values = Matrix::Zero(p, n);
  MaskMatrix mask = MaskMatrix::Zero(p, n);
  for (std::size_t r = 0; r < file_rows; ++r) {
    for (std::size_t c = 0; c < file_cols; ++c) {
      const std::string& cell = raw[r][c];
      const Index j = static_cast<Index>(transpose ? c : r);
      const Index t = static_cast<Index>(transpose ? r : c);
      if (detail::is_missing_token(cell)) continue;
      double x = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw std::invalid_argument("read_csv: unparseable cell '" + cell +
                                    "' at data row " + std::to_string(r + 1) +
                                    ", column " + std::to_string(c + 1));
      }
      values(j, t) = x;
      mask(j, t) = 1;
    }
  }
  CsvData out;
  out.matrix = build_masked(values, mask);
  if (!transpose) out.time_labels = std::move(labels);
  return out;
}

inline CsvData read_csv_file(const std::string& path, bool transpose = false,
                             bool header = false) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("read_csv: cannot open '" + path + "'");
  }
  return read_csv(in, transpose, header);
}

/// Writes the matrix with NA for unobserved cells and shortest round-trip
/// decimals for observed ones, so read_csv reproduces it bit for bit.
inline void write_csv(std::ostream& out, const MaskedMatrix& m,
                      const std::vector<std::string>& time_labels = {}) {
  if (!time_labels.empty()) {
    if (static_cast<Index>(time_labels.size()) != m.n()) {
      throw std::invalid_argument("write_csv: label count differs from n");
    }
    for (Index t = 0; t < m.n(); ++t) {
      if (t) out << ',';
      out << time_labels[static_cast<std::size_t>(t)];
    }
    out << '\n';
  }
  for (Index j = 0; j < m.p(); ++j) {
    for (Index t = 0; t < m.n(); ++t) {
      if (t) out << ',';
      if (m.mask(j, t)) out << format_double(m.values(j, t));
      else out << "NA";
    }
    out << '\n';
  }
}

inline void write_csv_file(const std::string& path, const MaskedMatrix& m,
                           const std::vector<std::string>& time_labels = {}) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("write_csv: cannot open '" + path + "'");
  }
  write_csv(out, m, time_labels);
}

}  // namespace misscusum
