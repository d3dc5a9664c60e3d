#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "autoens/dataset.hpp"
#include "autoens/error.hpp"

namespace autoens {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row,
                         const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw DataError("row " + std::to_string(row) + ", column '" + column +
                    "': cannot parse '" + cell + "' as a number");
  }
  return value;
}

}  // namespace detail

// Loads a headered CSV into a Dataset, preserving row order. The label column
// must hold -1/+1 or 0/1 (0/1 is mapped to -1/+1); every other column becomes
// a feature in header order.
inline Dataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column,
                        SplitTag tag = SplitTag::kTrain) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset file " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("dataset file " + path.string() + " is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = detail::split_csv_line(line);

  std::size_t label_index = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) {
      label_index = i;
      break;
    }
  }
  if (label_index == header.size()) {
    throw ConfigError("label column '" + label_column + "' not found in " +
                      path.string());
  }

  Dataset data;
  data.split_tag = tag;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i != label_index) data.feature_names.push_back(header[i]);
  }

  std::size_t row = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    Example e;
    e.features.reserve(header.size() - 1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_index) continue;
      e.features.push_back(detail::parse_cell(cells[i], row, header[i]));
    }
    const double raw = detail::parse_cell(cells[label_index], row, label_column);
    if (raw == -1.0 || raw == 1.0) {
      e.label = static_cast<int>(raw);
    } else if (raw == 0.0) {
      e.label = -1;
    } else {
      throw DataError("row " + std::to_string(row) + ", column '" +
                      label_column + "': label must be -1/+1 or 0/1, got '" +
                      cells[label_index] + "'");
    }
    data.examples.push_back(std::move(e));
    ++row;
  }
  if (data.examples.empty()) {
    throw DataError("dataset file " + path.string() +
                    " has a header but no rows");
  }
  return data;
}

// Writes a dataset back out; used by tests and fixture generation.
inline void save_csv(const Dataset& data, const std::filesystem::path& path,
                     const std::string& label_column = "label") {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write dataset file " + path.string());
  for (std::size_t i = 0; i < data.feature_names.size(); ++i) {
    out << data.feature_names[i] << ',';
  }
  out << label_column << '\n';
  out.precision(17);
  for (const Example& e : data.examples) {
    for (double v : e.features) out << v << ',';
    out << e.label << '\n';
  }
}

}  // namespace autoens
