#include "haphazard/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "haphazard/error.hpp"

namespace haphazard {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return false;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

bool matches_marker(const std::string& cell, const std::vector<std::string>& markers) {
  const std::string t = trim(cell);
  return std::find(markers.begin(), markers.end(), t) != markers.end();
}

// Splits one physical line; double quotes protect delimiters and escape as "".
std::vector<std::string> split_csv_line(const std::string& line, char delimiter, int line_no) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      out.push_back(cell);
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted)
    raise(Errc::parse, "unterminated quote at line " + std::to_string(line_no));
  out.push_back(cell);
  return out;
}

int parse_label(const std::string& cell, std::size_t row) {
  double v;
  if (!parse_number(cell, v) || (v != 0.0 && v != 1.0 && v != -1.0))
    raise(Errc::format,
          "label at row " + std::to_string(row) + " must be one of {0,1,-1,+1}, got \"" +
              trim(cell) + "\"");
  return v == 1.0 ? 1 : 0;
}

}  // namespace

Table load_table_csv(const std::string& path, char delimiter, Header header) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open " + path);
  Table table;
  table.source = path;
  std::string line;
  int line_no = 0;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() && rows.empty() && table.column_names.empty()) continue;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line, delimiter, line_no);
    if (!rows.empty() && cells.size() != rows.front().size())
      raise(Errc::format, "row at line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(rows.front().size()));
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) raise(Errc::format, "no rows in " + path);

  bool has_header = false;
  if (header == Header::yes) {
    has_header = true;
  } else if (header == Header::automatic) {
    // A first row with any cell that is neither numeric nor a missing marker
    // is taken as a header.
    for (const auto& cell : rows.front()) {
      double v;
      if (!parse_number(cell, v) && !matches_marker(cell, kDefaultMissingMarkers)) {
        has_header = true;
        break;
      }
    }
  }
  if (has_header) {
    for (auto& cell : rows.front()) table.column_names.push_back(trim(cell));
    rows.erase(rows.begin());
    if (rows.empty()) raise(Errc::format, "header-only file " + path);
  } else {
    for (std::size_t c = 0; c < rows.front().size(); ++c)
      table.column_names.push_back("c" + std::to_string(c));
  }
  table.cells = std::move(rows);
  return table;
}

void encode_categorical(Table& table, std::size_t column, Encoding scheme,
                        const std::vector<std::string>& missing_markers) {
  if (column >= table.column_names.size())
    raise(Errc::invalid_input, "encode column " + std::to_string(column) + " out of range");
  if (scheme == Encoding::integer_codes) {
    std::unordered_map<std::string, int> codes;
    for (auto& row : table.cells) {
      std::string t = trim(row[column]);
      if (matches_marker(t, missing_markers)) continue;
      auto [it, inserted] = codes.emplace(t, static_cast<int>(codes.size()) + 1);
      row[column] = std::to_string(it->second);
    }
    table.source += ";integer_codes:" + table.column_names[column];
    return;
  }
  // bracket_median: "[a,b]" or "[a-b]" (open or closed ends) becomes (a+b)/2.
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    std::string t = trim(table.cells[r][column]);
    if (matches_marker(t, missing_markers)) continue;
    if (t.size() < 5 || (t.front() != '[' && t.front() != '(') ||
        (t.back() != ']' && t.back() != ')'))
      raise(Errc::encoding, "cell \"" + t + "\" at row " + std::to_string(r) +
                                " is not an interval");
    std::string body = t.substr(1, t.size() - 2);
    std::size_t sep = body.find(',');
    if (sep == std::string::npos) {
      // Dash separator: skip a leading minus sign of the lower bound.
      sep = body.find('-', body.find_first_not_of(" -"));
    }
    double lo, hi;
    if (sep == std::string::npos || !parse_number(body.substr(0, sep), lo) ||
        !parse_number(body.substr(sep + 1), hi))
      raise(Errc::encoding, "cell \"" + t + "\" at row " + std::to_string(r) +
                                " is not an interval");
    std::ostringstream mid;
    mid.precision(17);
    mid << (lo + hi) / 2.0;
    table.cells[r][column] = mid.str();
  }
  table.source += ";bracket_median:" + table.column_names[column];
}

Dataset table_to_dataset(const Table& table, const std::string& label_column,
                         const std::vector<std::string>& missing_markers) {
  const std::size_t width = table.column_names.size();
  std::size_t label_idx = width;
  auto named = std::find(table.column_names.begin(), table.column_names.end(), trim(label_column));
  if (named != table.column_names.end()) {
    label_idx = static_cast<std::size_t>(named - table.column_names.begin());
  } else {
    double v;
    if (!parse_number(label_column, v) || v != static_cast<long long>(v))
      raise(Errc::format, "label column \"" + label_column + "\" not found");
    long long idx = static_cast<long long>(v);
    if (idx < 0) idx += static_cast<long long>(width);
    if (idx < 0 || idx >= static_cast<long long>(width))
      raise(Errc::format, "label column " + label_column + " out of range for width " +
                              std::to_string(width));
    label_idx = static_cast<std::size_t>(idx);
  }

  Dataset ds;
  ds.source = table.source;
  for (std::size_t c = 0; c < width; ++c)
    if (c != label_idx) ds.feature_names.push_back(table.column_names[c]);
  ds.rows.reserve(table.cells.size());
  ds.labels.reserve(table.cells.size());
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    const auto& cells = table.cells[r];
    ds.labels.push_back(parse_label(cells[label_idx], r));
    std::vector<double> row;
    row.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_idx) continue;
      if (matches_marker(cells[c], missing_markers)) {
        row.push_back(kMissing);
        continue;
      }
      double v;
      if (!parse_number(cells[c], v))
        raise(Errc::parse, "non-numeric cell \"" + trim(cells[c]) + "\" at row " +
                               std::to_string(r) + " column " + std::to_string(c) +
                               " (" + table.column_names[c] + ")");
      row.push_back(v);
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::vector<std::string>& missing_markers, char delimiter,
                 Header header) {
  Table table = load_table_csv(path, delimiter, header);
  return table_to_dataset(table, label_column, missing_markers);
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open " + path);
  std::vector<int> labels;
  std::vector<std::vector<std::pair<long, double>>> sparse_rows;
  long max_index = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line
    labels.push_back(parse_label(token, static_cast<std::size_t>(sparse_rows.size())));
    std::vector<std::pair<long, double>> row;
    while (ls >> token) {
      std::size_t colon = token.find(':');
      if (colon == std::string::npos)
        raise(Errc::parse, "malformed token \"" + token + "\" at line " + std::to_string(line_no));
      double idx_v, val;
      if (!parse_number(token.substr(0, colon), idx_v) || idx_v != static_cast<long>(idx_v) ||
          idx_v < 1 || !parse_number(token.substr(colon + 1), val))
        raise(Errc::parse, "malformed token \"" + token + "\" at line " + std::to_string(line_no));
      long idx = static_cast<long>(idx_v);
      for (const auto& [seen_idx, seen_val] : row) {
        (void)seen_val;
        if (seen_idx == idx)
          raise(Errc::parse, "duplicate index " + std::to_string(idx) + " at line " +
                                 std::to_string(line_no));
      }
      row.emplace_back(idx, val);
      max_index = std::max(max_index, idx);
    }
    sparse_rows.push_back(std::move(row));
  }
  if (sparse_rows.empty()) raise(Errc::format, "no rows in " + path);

  Dataset ds;
  ds.source = path;
  for (long i = 1; i <= max_index; ++i) ds.feature_names.push_back("f" + std::to_string(i));
  ds.labels = std::move(labels);
  ds.rows.reserve(sparse_rows.size());
  for (const auto& sparse : sparse_rows) {
    std::vector<double> row(static_cast<std::size_t>(max_index), kMissing);
    for (const auto& [idx, val] : sparse) row[static_cast<std::size_t>(idx - 1)] = val;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

}  // namespace haphazard
