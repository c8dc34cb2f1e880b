#pragma once

#include <stdexcept>
#include <string>

namespace ehmarl {

// Caller broke a documented precondition (bad index, shape mismatch, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EpisodeExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient during learning.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IncompatibleCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IncomparableReports : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace ehmarl
