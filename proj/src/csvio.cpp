#include "bvarnu/csvio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bvarnu/errors.hpp"

namespace bvarnu {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::string coordinates(int row, int column) {
  return "row " + std::to_string(row) + ", column " + std::to_string(column);
}

bool is_log_family(Transform t) { return t == Transform::kLog || t == Transform::kLogDiff; }

}  // namespace

Transform parse_transform(std::string_view name) {
  name = trim(name);
  if (name == "none" || name.empty()) return Transform::kNone;
  if (name == "diff") return Transform::kDiff;
  if (name == "log") return Transform::kLog;
  if (name == "logdiff") return Transform::kLogDiff;
  if (name == "pct") return Transform::kPct;
  throw ConfigError("unknown transform '" + std::string(name) +
                    "' (expected none, diff, log, logdiff or pct)");
}

std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::kNone: return "none";
    case Transform::kDiff: return "diff";
    case Transform::kLog: return "log";
    case Transform::kLogDiff: return "logdiff";
    case Transform::kPct: return "pct";
  }
  return "none";
}

SeriesTransform SeriesTransform::parse(std::string_view spec) {
  SeriesTransform out;
  for (const auto& part : split_csv_line(spec)) out.columns.push_back(parse_transform(part));
  return out;
}

Transform SeriesTransform::for_column(std::size_t j) const {
  if (columns.empty()) return Transform::kNone;
  if (columns.size() == 1) return columns.front();
  if (j >= columns.size()) throw ConfigError("transform list is shorter than the column count");
  return columns[j];
}

bool SeriesTransform::shortens() const {
  for (Transform t : columns) {
    if (t == Transform::kDiff || t == Transform::kLogDiff || t == Transform::kPct) return true;
  }
  return false;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

Eigen::MatrixXd apply_transform(const Eigen::MatrixXd& raw, const SeriesTransform& transform,
                                const std::vector<std::string>& names) {
  const Eigen::Index T = raw.rows();
  const Eigen::Index m = raw.cols();
  if (transform.columns.size() > 1 && static_cast<Eigen::Index>(transform.columns.size()) != m) {
    throw ConfigError("transform list has " + std::to_string(transform.columns.size()) +
                      " entries for " + std::to_string(m) + " columns");
  }
  const int drop = transform.shortens() ? 1 : 0;
  if (T - drop < 1) throw ParseError("not enough rows to apply differencing transforms");
  Eigen::MatrixXd out(T - drop, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Transform t = transform.for_column(static_cast<std::size_t>(j));
    const std::string label =
        j < static_cast<Eigen::Index>(names.size()) ? names[j] : std::to_string(j + 1);
    for (Eigen::Index r = drop; r < T; ++r) {
      const double x = raw(r, j);
      const double prev = r > 0 ? raw(r - 1, j) : 0.0;
      double value = x;
      switch (t) {
        case Transform::kNone: break;
        case Transform::kDiff: value = x - prev; break;
        case Transform::kLog:
          if (!(x > 0.0)) throw ParseError("log transform of non-positive value in '" + label + "'");
          value = std::log(x);
          break;
        case Transform::kLogDiff:
          if (!(x > 0.0) || !(prev > 0.0)) {
            throw ParseError("logdiff transform of non-positive value in '" + label + "'");
          }
          value = std::log(x) - std::log(prev);
          break;
        case Transform::kPct:
          if (prev == 0.0) throw ParseError("pct transform with zero base in '" + label + "'");
          value = 100.0 * (x / prev - 1.0);
          break;
      }
      out(r - drop, j) = value;
    }
  }
  return out;
}

VarDataset parse_csv(std::string_view text, const CsvOptions& options) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw ParseError("CSV is empty");

  const auto header = split_csv_line(lines.front());
  int date_index = -1;
  if (options.date_column) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == *options.date_column) date_index = static_cast<int>(j);
    }
    if (date_index < 0) {
      throw ParseError("date column '" + *options.date_column + "' not found in header");
    }
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<int>(j) != date_index) names.push_back(header[j]);
  }
  if (names.empty()) throw ParseError("CSV has no numeric columns");
  const int rows = static_cast<int>(lines.size()) - 1;
  if (rows < 1) throw ParseError("CSV has a header but no data rows");

  Eigen::MatrixXd raw(rows, static_cast<Eigen::Index>(names.size()));
  std::vector<std::string> labels;
  for (int r = 0; r < rows; ++r) {
    const auto fields = split_csv_line(lines[static_cast<std::size_t>(r) + 1]);
    const int row_number = r + 1;
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row_number) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    Eigen::Index out_col = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const int column_number = static_cast<int>(j) + 1;
      if (static_cast<int>(j) == date_index) {
        labels.push_back(fields[j]);
        continue;
      }
      const std::string& cell = fields[j];
      if (cell.empty()) {
        throw ParseError("missing value at " + coordinates(row_number, column_number));
      }
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw ParseError("non-numeric value '" + cell + "' at " +
                         coordinates(row_number, column_number));
      }
      const Transform t = options.transform.for_column(static_cast<std::size_t>(out_col));
      if (is_log_family(t) && !(value > 0.0)) {
        throw ParseError("non-positive value " + cell + " under " +
                         std::string(transform_name(t)) + " at " +
                         coordinates(row_number, column_number));
      }
      raw(r, out_col++) = value;
    }
  }

  VarDataset data;
  data.observations = apply_transform(raw, options.transform, names);
  data.variable_names = std::move(names);
  data.frequency = options.frequency;
  if (!labels.empty()) {
    const auto drop = static_cast<std::ptrdiff_t>(labels.size()) - data.T();
    data.row_labels.assign(labels.begin() + drop, labels.end());
  }
  data.validate();
  return data;
}

VarDataset ingest_csv(const std::filesystem::path& path, const CsvOptions& options) {
  try {
    return parse_csv(read_text_file(path), options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string dataset_csv(const VarDataset& data) {
  std::string out;
  const bool labelled = !data.row_labels.empty();
  if (labelled) out += "date,";
  for (int j = 0; j < data.m(); ++j) {
    if (j > 0) out += ',';
    out += data.variable_names[static_cast<std::size_t>(j)];
  }
  out += '\n';
  for (int t = 0; t < data.T(); ++t) {
    if (labelled) out += data.row_labels[static_cast<std::size_t>(t)] + ",";
    for (int j = 0; j < data.m(); ++j) {
      if (j > 0) out += ',';
      out += format_double(data.observations(t, j));
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  file.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!file) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

}  // namespace bvarnu
