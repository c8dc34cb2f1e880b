#pragma once

#include <string>
#include <vector>

#include "ehmarl/approx/params.hpp"

namespace ehmarl::approx {

enum class Activation { leaky_relu, identity };

inline double leaky_relu(double x, double slope) { return x > 0.0 ? x : slope * x; }

inline MatrixXd apply(Activation a, const MatrixXd& pre, double slope) {
  if (a == Activation::identity) return pre;
  return pre.unaryExpr([slope](double v) { return leaky_relu(v, slope); });
}

// Multiplies an upstream gradient by the activation derivative at `pre`.
inline MatrixXd apply_grad(Activation a, const MatrixXd& pre, const MatrixXd& upstream, double slope) {
  if (a == Activation::identity) return upstream;
  return upstream.binaryExpr(pre, [slope](double g, double v) { return v > 0.0 ? g : slope * g; });
}

// Activations recorded by a forward pass; consumed by backward.
struct MlpCache {
  const void* arch = nullptr;
  const double* params = nullptr;
  std::vector<MatrixXd> inputs;  // input of each layer
  std::vector<MatrixXd> pre;     // pre-activation of each layer
};

// Fully connected network on column batches: input (in_dim x B) -> (out_dim x B).
class Mlp {
 public:
  Mlp() = default;

  Mlp(ParamLayout& layout, const std::string& prefix, std::vector<int> sizes, std::vector<Activation> acts,
      double slope = 0.01)
      : sizes_(std::move(sizes)), acts_(std::move(acts)), slope_(slope) {
    require(sizes_.size() >= 2, "Mlp: need at least input and output sizes");
    require(acts_.size() == sizes_.size() - 1, "Mlp: one activation per layer");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const std::string tag = prefix + ".l" + std::to_string(l);
      w_off_.push_back(layout.add(tag + ".W", sizes_[l + 1], sizes_[l], sizes_[l]));
      b_off_.push_back(layout.add(tag + ".b", sizes_[l + 1], 1, 0));
    }
  }

  // Convenience: hidden layers leaky, output identity.
  static Mlp dense(ParamLayout& layout, const std::string& prefix, int in, const std::vector<int>& hidden, int out,
                   double slope, Activation output = Activation::identity) {
    std::vector<int> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    std::vector<Activation> acts(sizes.size() - 1, Activation::leaky_relu);
    acts.back() = output;
    return Mlp(layout, prefix, std::move(sizes), std::move(acts), slope);
  }

  int in_dim() const { return sizes_.front(); }
  int out_dim() const { return sizes_.back(); }
  std::size_t layers() const { return w_off_.size(); }
  const std::vector<int>& sizes() const { return sizes_; }
  double slope() const { return slope_; }

  MatrixXd forward(const ParamVector& p, const MatrixXd& x, MlpCache* cache = nullptr) const {
    require(x.rows() == in_dim(), "Mlp::forward: input dimension " + std::to_string(x.rows()) + " != " +
                                      std::to_string(in_dim()));
    if (cache) {
      cache->arch = this;
      cache->params = p.data();
      cache->inputs.resize(layers());
      cache->pre.resize(layers());
    }
    MatrixXd h = x;
    for (std::size_t l = 0; l < layers(); ++l) {
      const auto W = view(p, w_off_[l], sizes_[l + 1], sizes_[l]);
      const auto b = view(p, b_off_[l], sizes_[l + 1], 1);
      MatrixXd pre = W * h;
      pre.colwise() += b.col(0);
      MatrixXd out = apply(acts_[l], pre, slope_);
      if (cache) {
        cache->inputs[l] = std::move(h);
        cache->pre[l] = std::move(pre);
      }
      h = std::move(out);
    }
    return h;
  }

  // Accumulates d(out)/d(params) contracted with `dout` into `grad` and
  // returns the gradient with respect to the input batch.
  MatrixXd backward(const ParamVector& p, const MlpCache& cache, const MatrixXd& dout, Gradients& grad) const {
    require(cache.arch == this && cache.params == p.data() && cache.inputs.size() == layers(),
            "Mlp::backward: cache does not come from a forward pass of these parameters");
    require(dout.rows() == out_dim() && dout.cols() == cache.inputs[0].cols(),
            "Mlp::backward: output gradient has the wrong shape");
    require(grad.size() >= p.size(), "Mlp::backward: gradient buffer too small");
    MatrixXd g = dout;
    for (std::size_t l = layers(); l-- > 0;) {
      const MatrixXd dpre = apply_grad(acts_[l], cache.pre[l], g, slope_);
      view(grad, w_off_[l], sizes_[l + 1], sizes_[l]).noalias() += dpre * cache.inputs[l].transpose();
      view(grad, b_off_[l], sizes_[l + 1], 1).col(0) += dpre.rowwise().sum();
      const auto W = view(p, w_off_[l], sizes_[l + 1], sizes_[l]);
      g = W.transpose() * dpre;
    }
    return g;
  }

 private:
  std::vector<int> sizes_;
  std::vector<Activation> acts_;
  double slope_ = 0.01;
  std::vector<Eigen::Index> w_off_, b_off_;
};

}  // namespace ehmarl::approx
