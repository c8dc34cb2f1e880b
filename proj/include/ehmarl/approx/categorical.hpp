#pragma once

#include <cmath>
#include <vector>

#include "ehmarl/approx/mlp.hpp"

namespace ehmarl::approx {

// Column-wise softmax with max subtraction.
inline MatrixXd softmax_cols(const MatrixXd& logits) {
  MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - m).exp();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

inline VectorXd softmax(const VectorXd& logits) { return softmax_cols(logits); }

inline MatrixXd log_softmax_cols(const MatrixXd& logits) {
  MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    const double lse = m + std::log((logits.col(c).array() - m).exp().sum());
    out.col(c) = logits.col(c).array() - lse;
  }
  return out;
}

inline double entropy(const VectorXd& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) h -= probs[i] * std::log(probs[i]);
  }
  return h;
}

// Policy network: observation -> logits -> probabilities over actions.
class CategoricalPolicy {
 public:
  CategoricalPolicy() = default;
  CategoricalPolicy(ParamLayout& layout, const std::string& prefix, int obs_dim, const std::vector<int>& hidden,
                    int actions, double slope)
      : net_(Mlp::dense(layout, prefix, obs_dim, hidden, actions, slope)) {}

  int actions() const { return net_.out_dim(); }
  int obs_dim() const { return net_.in_dim(); }
  const Mlp& net() const { return net_; }

  MatrixXd logits(const ParamVector& p, const MatrixXd& obs, MlpCache* cache = nullptr) const {
    return net_.forward(p, obs, cache);
  }

  MatrixXd probabilities(const ParamVector& p, const MatrixXd& obs) const { return softmax_cols(logits(p, obs)); }

  VectorXd probabilities(const ParamVector& p, const VectorXd& obs) const {
    return softmax_cols(logits(p, MatrixXd(obs)));
  }

 private:
  Mlp net_;
};

}  // namespace ehmarl::approx
