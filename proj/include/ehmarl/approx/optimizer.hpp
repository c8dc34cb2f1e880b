#pragma once

#include <cmath>

#include "ehmarl/approx/params.hpp"
#include "ehmarl/core/errors.hpp"

namespace ehmarl::approx {

// Adaptive-moment state for one flat parameter vector. With `plain` set the
// step degenerates to ordinary gradient descent.
struct OptimizerState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool plain = false;
  long step = 0;
  VectorXd m, v;

  static OptimizerState adam(Eigen::Index size, double lr) {
    OptimizerState s;
    s.learning_rate = lr;
    s.m = VectorXd::Zero(size);
    s.v = VectorXd::Zero(size);
    return s;
  }

  static OptimizerState sgd(Eigen::Index size, double lr) {
    OptimizerState s = adam(size, lr);
    s.plain = true;
    return s;
  }
};

// Rescales g in place so its Euclidean norm is at most max_norm (<= 0: off).
// Returns the norm before scaling.
inline double clip_by_norm(Gradients& g, double max_norm) {
  const double n = g.norm();
  if (max_norm > 0.0 && n > max_norm) g *= max_norm / n;
  return n;
}

inline void optimizer_step(ParamVector& params, const Gradients& grad, OptimizerState& s) {
  require(params.size() == grad.size() && s.m.size() == params.size() && s.v.size() == params.size(),
          "optimizer_step: parameter, gradient, and moment shapes differ");
  if (!grad.allFinite()) throw TrainingDivergence("optimizer_step: non-finite gradient");
  ++s.step;
  if (s.plain) {
    params.noalias() -= s.learning_rate * grad;
    return;
  }
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grad;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  params.array() -= s.learning_rate * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + s.epsilon);
}

}  // namespace ehmarl::approx
