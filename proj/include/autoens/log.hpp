#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace autoens {

// Line-delimited structured run log. Shared by the search loop and the
// simulated cluster; test assertions read the in-memory copy. Unlike the
// metrics CSV, entries here may carry wall-clock fields and are not part of
// any byte-determinism contract.
class RunLog {
 public:
  RunLog() = default;

  explicit RunLog(std::filesystem::path path) : path_(std::move(path)) {
    std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::app);  // touch
  }

  void record(nlohmann::json fields) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (path_.has_value()) {
      std::ofstream out(*path_, std::ios::app);
      out << fields.dump() << '\n';
    }
    entries_.push_back(std::move(fields));
  }

  std::vector<nlohmann::json> entries() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_;
  }

  std::size_t count_events(const std::string& event) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::size_t n = 0;
    for (const auto& e : entries_) {
      if (e.contains("event") && e["event"] == event) ++n;
    }
    return n;
  }

 private:
  mutable std::mutex mutex_;
  std::optional<std::filesystem::path> path_;
  std::vector<nlohmann::json> entries_;
};

}  // namespace autoens
