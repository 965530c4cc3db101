#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include "uqcpt/cli.hpp"
#include "uqcpt/error.hpp"

namespace uqcpt::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_position(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::size_t resolve(const std::string& column, const std::vector<std::string>* header, std::size_t width) {
  if (header != nullptr) {
    const auto it = std::find(header->begin(), header->end(), column);
    if (it != header->end()) return static_cast<std::size_t>(it - header->begin());
  }
  if (is_position(column)) {
    const auto pos = std::stoul(column);
    if (pos >= 1 && pos <= width) return pos - 1;
    throw Error("column " + column + " is out of range (the file has " + std::to_string(width) + " columns)");
  }
  throw Error(header != nullptr ? "no column named '" + column + "' in the header"
                                : "column '" + column + "' requested by name but the file has no header");
}

}  // namespace

Series read_series(std::istream& in, const std::optional<std::string>& column,
                   const std::optional<std::string>& index_column) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split(line));
  }
  if (rows.empty()) throw Error("input contains no data rows");

  // A first row with a text field where the next row has a number is a header.
  const auto numeric_mask = [](const std::vector<std::string>& fields) {
    std::vector<bool> mask;
    for (const auto& f : fields) mask.push_back(parse_number(f).has_value());
    return mask;
  };
  const auto first_mask = numeric_mask(rows[0].second);
  bool has_header = std::find(first_mask.begin(), first_mask.end(), false) != first_mask.end();
  if (has_header && rows.size() > 1) {
    const auto second_mask = numeric_mask(rows[1].second);
    has_header = false;
    for (std::size_t c = 0; c < std::min(first_mask.size(), second_mask.size()); ++c) {
      has_header = has_header || (!first_mask[c] && second_mask[c]);
    }
  }
  std::vector<std::string> header;
  if (has_header) {
    header = rows[0].second;
    rows.erase(rows.begin());
  }
  if (rows.empty()) throw Error("input contains a header but no data rows");

  const std::size_t width = rows[0].second.size();
  const std::vector<std::string>* names = has_header ? &header : nullptr;
  const bool labelled = index_column.has_value();
  const std::size_t label_col = labelled ? resolve(*index_column, names, width) : width;
  std::size_t col = 0;
  if (column) {
    col = resolve(*column, names, width);
  } else {
    // the index column is never the default data column
    auto mask = numeric_mask(rows[0].second);
    if (labelled) mask[label_col] = false;
    const auto it = std::find(mask.begin(), mask.end(), true);
    if (it == mask.end()) throw Error("line " + std::to_string(rows[0].first) + ": no numeric column found");
    col = static_cast<std::size_t>(it - mask.begin());
  }

  Series series;
  series.column = has_header && col < header.size() ? header[col] : "#" + std::to_string(col + 1);
  series.values.reserve(rows.size());
  for (const auto& [line_no, fields] : rows) {
    if (col >= fields.size() || (labelled && label_col >= fields.size())) {
      throw Error("line " + std::to_string(line_no) + ": too few fields");
    }
    const auto v = parse_number(fields[col]);
    if (!v) {
      throw Error("line " + std::to_string(line_no) + ": non-numeric value '" + fields[col] + "' in " +
                  series.column);
    }
    series.values.push_back(*v);
    if (labelled) series.labels.push_back(fields[label_col]);
  }
  return series;
}

}  // namespace uqcpt::cli
