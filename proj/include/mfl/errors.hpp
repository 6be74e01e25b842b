#pragma once

#include <stdexcept>
#include <string>

namespace mfl {

// Data-layer failures: CSV parsing, schema violations, label problems.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A predictor that cannot be filled by any imputation rule.
class ImputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backtracking exhausted its shrink budget; carries the last step size tried.
class StepSizeError : public std::runtime_error {
 public:
  StepSizeError(const std::string& msg, double last_tau)
      : std::runtime_error(msg), last_tau(last_tau) {}
  double last_tau;
};

class DivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tuning-parameter machinery: degenerate folds, empty tables, absent classes.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ImportanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfl
