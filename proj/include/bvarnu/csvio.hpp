#pragma once

// CSV ingestion with per-column stationarity transforms, and the small set of
// output helpers shared by every report writer.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bvarnu/varcore.hpp"

namespace bvarnu {

enum class Transform { kNone, kDiff, kLog, kLogDiff, kPct };

Transform parse_transform(std::string_view name);
std::string_view transform_name(Transform t);

/// Either one transform for every column, or one per column.
struct SeriesTransform {
  std::vector<Transform> columns;

  /// "logdiff" applies to all columns; "none,logdiff,diff" is positional.
  static SeriesTransform parse(std::string_view spec);
  Transform for_column(std::size_t j) const;
  bool shortens() const;
};

struct CsvOptions {
  SeriesTransform transform;
  /// Name of a non-numeric label column (e.g. dates) to carry as row labels.
  std::optional<std::string> date_column;
  std::string frequency;
};

/// Rectangular CSV with a header row and numeric body. Errors name the
/// offending data row (1-based, header excluded) and column (1-based).
VarDataset ingest_csv(const std::filesystem::path& path, const CsvOptions& options = {});
VarDataset parse_csv(std::string_view text, const CsvOptions& options = {});

/// Apply transforms column-wise. Differencing transforms drop the first row of
/// every column so the result stays aligned.
Eigen::MatrixXd apply_transform(const Eigen::MatrixXd& raw, const SeriesTransform& transform,
                                const std::vector<std::string>& names = {});

/// 17 significant digits; enough for every double to round-trip.
std::string format_double(double value);

std::string dataset_csv(const VarDataset& data);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

/// Split one CSV line on commas (no quoting support beyond trimming quotes).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace bvarnu
