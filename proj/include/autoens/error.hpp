#pragma once

#include <stdexcept>
#include <string>

namespace autoens {

// Base for all errors thrown by the library. CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension / shape mismatch in matrix or logit bookkeeping.
class ShapeError final : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error("shape error: " + msg) {}
};

// Violated call precondition (empty dataset, lr <= 0, ...).
class PreconditionError final : public Error {
 public:
  explicit PreconditionError(const std::string& msg)
      : Error("precondition error: " + msg) {}
};

// Malformed input data (CSV cells, labels, feature schema).
class DataError final : public Error {
 public:
  explicit DataError(const std::string& msg) : Error("data error: " + msg) {}
};

// Bad run configuration (unknown keys, missing files, invalid combinations).
class ConfigError final : public Error {
 public:
  explicit ConfigError(const std::string& msg)
      : Error("config error: " + msg) {}
};

// Non-finite loss or gradient during subnetwork training.
class TrainingError final : public Error {
 public:
  explicit TrainingError(const std::string& msg)
      : Error("training error: " + msg) {}
};

// Mixture-weight optimization failed (non-finite gradient).
class OptimizationError final : public Error {
 public:
  explicit OptimizationError(const std::string& msg)
      : Error("optimization error: " + msg) {}
};

// A complexity measure applied to a family it does not support.
class UnsupportedMeasureError final : public Error {
 public:
  explicit UnsupportedMeasureError(const std::string& msg)
      : Error("unsupported measure: " + msg) {}
};

// Checkpoint store problems: nothing to load, digest mismatch with no fallback.
class CheckpointError final : public Error {
 public:
  explicit CheckpointError(const std::string& msg)
      : Error("checkpoint error: " + msg) {}
};

// Simulated cluster failure (watchdog timeout, bad worker index).
class ClusterError final : public Error {
 public:
  explicit ClusterError(const std::string& msg)
      : Error("cluster error: " + msg) {}
};

}  // namespace autoens
