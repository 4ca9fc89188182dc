#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace haphazard {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

inline const std::vector<std::string> kDefaultMissingMarkers = {"?", "nan", "NaN", ""};

// Fully parsed tabular dataset: fixed width, binary labels, row order preserved.
// Missing cells are NaN.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;  // each row has feature_names.size() entries
  std::vector<int> labels;                // one per row, in {0,1}
  std::string source;                     // path + encoding notes, for provenance only

  std::size_t width() const { return feature_names.size(); }
  std::size_t size() const { return rows.size(); }
};

// Raw delimited text, cells still strings. Categorical encoding happens here,
// before numeric parsing.
struct Table {
  std::vector<std::string> column_names;            // synthesized "c<i>" when headerless
  std::vector<std::vector<std::string>> cells;      // ragged input rejected at load
  std::string source;
};

enum class Header { automatic, yes, no };
enum class Encoding { integer_codes, bracket_median };

Table load_table_csv(const std::string& path, char delimiter = ',',
                     Header header = Header::automatic);

// integer_codes: distinct non-missing strings become 1..K in first-appearance
// order. bracket_median: interval strings "[a,b]" / "[a-b)" become midpoints.
void encode_categorical(Table& table, std::size_t column, Encoding scheme,
                        const std::vector<std::string>& missing_markers = kDefaultMissingMarkers);

// label_column: column name (requires a header) or integer index, negative
// counting from the end. Labels accept 0/1/-1/+1; -1 maps to 0.
Dataset table_to_dataset(const Table& table, const std::string& label_column,
                         const std::vector<std::string>& missing_markers = kDefaultMissingMarkers);

Dataset load_csv(const std::string& path, const std::string& label_column = "-1",
                 const std::vector<std::string>& missing_markers = kDefaultMissingMarkers,
                 char delimiter = ',', Header header = Header::automatic);

// Sparse `label idx:val ...` lines, 1-based indices mapped to dense columns.
// Absent indices are missing; duplicate indices in one line are an error.
Dataset load_libsvm(const std::string& path);

}  // namespace haphazard
