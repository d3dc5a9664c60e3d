#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "autoens/complexity.hpp"
#include "autoens/ensemble.hpp"
#include "autoens/error.hpp"

namespace autoens {

// Shortest round-trip decimal form; keeps every CSV byte deterministic.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kMetricsHeader =
    "row_type,iteration,global_step,id,measure,value,objective,"
    "train_accuracy,eval_accuracy,margin_error,bound_margin_error,"
    "bound_complexity,bound_slack,bound_total,weight_l1,selected";

// One complexity evaluation row: only the first six columns are populated.
struct ComplexityCsvRow {
  std::size_t iteration = 0;
  std::uint64_t global_step = 0;
  std::string subnetwork_id;
  MeasureKind measure = MeasureKind::kRademacherProxy;
  double value = 0.0;

  std::string to_csv() const {
    std::ostringstream out;
    out << "complexity," << iteration << ',' << global_step << ','
        << subnetwork_id << ',' << to_string(measure) << ','
        << format_double(value) << ",,,,,,,,,,";
    return out.str();
  }
};

// One candidate evaluation row.
struct CandidateCsvRow {
  std::size_t iteration = 0;
  std::uint64_t global_step = 0;
  std::string candidate_id;
  double objective = 0.0;
  double train_accuracy = 0.0;
  double eval_accuracy = 0.0;
  double margin_error = 0.0;
  BoundReport bound;
  double weight_l1 = 0.0;
  bool selected = false;

  std::string to_csv() const {
    std::ostringstream out;
    out << "candidate," << iteration << ',' << global_step << ','
        << candidate_id << ",,," << format_double(objective) << ','
        << format_double(train_accuracy) << ',' << format_double(eval_accuracy)
        << ',' << format_double(margin_error) << ','
        << format_double(bound.empirical_margin_error) << ','
        << format_double(bound.complexity_term) << ','
        << format_double(bound.slack_term) << ',' << format_double(bound.total)
        << ',' << format_double(weight_l1) << ',' << (selected ? 1 : 0);
    return out.str();
  }
};

// Append-only metrics file. On resume, rows from iterations at or beyond the
// restart point are dropped before appending so an interrupted run converges
// to the same bytes as an uninterrupted one.
class MetricsWriter {
 public:
  MetricsWriter() = default;

  void open(const std::filesystem::path& path, std::size_t resume_iteration) {
    path_ = path;
    std::vector<std::string> keep;
    if (std::filesystem::exists(path_)) {
      std::ifstream in(path_);
      std::string line;
      bool header = true;
      while (std::getline(in, line)) {
        if (header) {
          header = false;
          continue;
        }
        if (line.empty()) continue;
        // iteration is the second column
        const auto first_comma = line.find(',');
        const auto second_comma = line.find(',', first_comma + 1);
        const std::size_t row_iteration =
            std::stoull(line.substr(first_comma + 1,
                                    second_comma - first_comma - 1));
        if (row_iteration < resume_iteration) keep.push_back(line);
      }
    }
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw DataError("cannot open metrics file " + path_.string());
    out << kMetricsHeader << '\n';
    for (const auto& line : keep) out << line << '\n';
  }

  void append(const std::string& csv_line) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw DataError("cannot append to metrics file " + path_.string());
    out << csv_line << '\n';
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace autoens
