#include "palms/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "palms/error.hpp"

namespace palms {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  // trailing blank lines are not rows
  while (!out.empty() && trim(out.back()).empty()) out.pop_back();
  if (!out.empty() && out.front().starts_with("\xEF\xBB\xBF")) out.front().remove_prefix(3);
  return out;
}

double parse_number(std::string_view cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc{} || ptr != last) {
    throw DataError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                    ": not a number: '" + std::string(cell) + "'");
  }
  return v;
}

Dataset parse(std::string_view text, bool labels_required) {
  const auto lines = lines_of(text);
  if (lines.empty() || trim(lines.front()).empty()) throw DataError("missing CSV header row");
  const auto header = split_fields(lines.front());
  const bool has_label = header.back() == "label";
  if (labels_required && !has_label) {
    throw DataError("final CSV column must be named 'label'");
  }
  const std::size_t n_cols = header.size();
  const std::size_t n_features = has_label ? n_cols - 1 : n_cols;
  if (n_features == 0) throw DataError("CSV has no feature columns");

  std::vector<LabeledPoint> points;
  points.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::size_t row = r;  // 1-based data row number, header is row 0
    const auto fields = split_fields(lines[r]);
    if (fields.size() != n_cols) {
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(n_cols) +
                      " columns, found " + std::to_string(fields.size()));
    }
    LabeledPoint p;
    p.id = points.size();
    p.x.reserve(n_features);
    for (std::size_t c = 0; c < n_features; ++c) {
      p.x.push_back(parse_number(fields[c], row, c + 1));
    }
    if (has_label && labels_required) {
      const double lv = parse_number(fields.back(), row, n_cols);
      if (lv != 0.0 && lv != 1.0) {
        throw DataError("row " + std::to_string(row) + ", column " + std::to_string(n_cols) +
                        " (label): must be 0 or 1, got '" + std::string(fields.back()) + "'");
      }
      p.y = lv == 1.0 ? ClassLabel::kOne : ClassLabel::kZero;
    }
    points.push_back(std::move(p));
  }
  try {
    return Dataset(n_features, std::move(points));
  } catch (const DataError& e) {
    throw DataError(std::string("CSV: ") + e.what());
  }
}

}  // namespace

Dataset parse_csv(std::string_view text) { return parse(text, true); }

Dataset parse_unlabeled_csv(std::string_view text) { return parse(text, false); }

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace palms
