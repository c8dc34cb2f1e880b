#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/random.hpp"

namespace ehmarl::approx {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using ConstMatMap = Eigen::Map<const MatrixXd>;
using MatMap = Eigen::Map<MatrixXd>;

// Flat parameter vector. Gradients, moments, and target copies share the
// layout of the parameters they belong to.
using ParamVector = VectorXd;
using Gradients = VectorXd;

struct TensorSlot {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;
  // Fan-in used for initialization; 0 marks a bias (zero-initialized).
  Eigen::Index fan_in = 0;

  Eigen::Index size() const { return rows * cols; }
};

// Registry of named tensors inside one flat parameter vector. Architectures
// record offsets at construction and read weights through maps at call time,
// so one architecture serves any number of parameter vectors.
class ParamLayout {
 public:
  Eigen::Index add(const std::string& name, Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in) {
    require(rows > 0 && cols > 0, "ParamLayout: tensor '" + name + "' must be non-empty");
    slots_.push_back({name, rows, cols, size_, fan_in});
    size_ += rows * cols;
    return slots_.back().offset;
  }

  Eigen::Index size() const { return size_; }
  const std::vector<TensorSlot>& slots() const { return slots_; }

  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  ParamVector initialize(Rng& rng) const {
    ParamVector p = ParamVector::Zero(size_);
    for (const auto& s : slots_) {
      if (s.fan_in == 0) continue;
      const double bound = 1.0 / std::sqrt(static_cast<double>(s.fan_in));
      for (Eigen::Index i = 0; i < s.size(); ++i) p[s.offset + i] = uniform(rng, -bound, bound);
    }
    return p;
  }

  ParamVector zeros() const { return ParamVector::Zero(size_); }

  void check(const ParamVector& p, const char* what) const {
    require(p.size() == size_, std::string(what) + ": parameter vector does not match the layout");
  }

 private:
  std::vector<TensorSlot> slots_;
  Eigen::Index size_ = 0;
};

inline ConstMatMap view(const ParamVector& p, Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) {
  return ConstMatMap(p.data() + offset, rows, cols);
}

inline MatMap view(Gradients& g, Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) {
  return MatMap(g.data() + offset, rows, cols);
}

inline bool all_finite(const VectorXd& v) { return v.allFinite(); }

}  // namespace ehmarl::approx
