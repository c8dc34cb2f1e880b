#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ehmarl/approx/categorical.hpp"
#include "ehmarl/approx/mlp.hpp"

namespace ehmarl::approx {

// Multi-head bilinear attention over agents. For agent j and every other
// agent l, head m scores  (Wq_m s_j)^T (Wk_m e_l) / sqrt(key_dim), normalizes
// the scores over l != j, and mixes the values leaky(Wv_m e_l). Head outputs
// are concatenated, so each head carries embed_dim / heads features.
//
// In uniform mode every other agent gets weight 1/(N-1) and no key or query
// matrices exist.
class MultiHeadAttention {
 public:
  struct Cache {
    const void* arch = nullptr;
    const double* params = nullptr;
    std::size_t agents = 0;
    std::vector<MatrixXd> keys_src, query_src;
    // [head][agent]
    std::vector<std::vector<MatrixXd>> K, Q, Vpre, V;
    // [head][query agent]: (agents x B), row of the query agent itself is 0
    std::vector<std::vector<MatrixXd>> weights;
  };

  MultiHeadAttention() = default;

  MultiHeadAttention(ParamLayout& layout, const std::string& prefix, int embed_dim, int heads, int key_dim,
                     double slope, bool uniform = false)
      : embed_(embed_dim), heads_(heads), key_dim_(key_dim), slope_(slope), uniform_(uniform) {
    require(heads >= 1, "attention: head count must be >= 1");
    require(embed_dim % heads == 0, "attention: embed_dim must be divisible by the head count");
    value_dim_ = embed_dim / heads;
    for (int m = 0; m < heads; ++m) {
      const std::string tag = prefix + ".h" + std::to_string(m);
      if (!uniform_) {
        k_off_.push_back(layout.add(tag + ".key", key_dim_, embed_, embed_));
        q_off_.push_back(layout.add(tag + ".query", key_dim_, embed_, embed_));
      }
      v_off_.push_back(layout.add(tag + ".value", value_dim_, embed_, embed_));
    }
  }

  int heads() const { return heads_; }
  int embed_dim() const { return embed_; }
  int key_dim() const { return key_dim_; }
  int value_dim() const { return value_dim_; }
  bool uniform() const { return uniform_; }

  // keys_src[l] (embed x B) feeds keys and values, query_src[j] feeds queries.
  // Returns z_j (embed x B) for every agent.
  std::vector<MatrixXd> forward(const ParamVector& p, const std::vector<MatrixXd>& keys_src,
                                const std::vector<MatrixXd>& query_src, Cache* cache = nullptr) const {
    const std::size_t N = keys_src.size();
    require(N >= 2, "attention: need at least two agents");
    require(query_src.size() == N, "attention: one query source per agent");
    const Eigen::Index B = keys_src[0].cols();
    for (std::size_t l = 0; l < N; ++l) {
      require(keys_src[l].rows() == embed_ && keys_src[l].cols() == B && query_src[l].rows() == embed_ &&
                  query_src[l].cols() == B,
              "attention: embedding dimensions are inconsistent");
    }
    Cache local;
    Cache& c = cache ? *cache : local;
    c.arch = this;
    c.params = p.data();
    c.agents = N;
    c.keys_src = keys_src;
    c.query_src = query_src;
    c.K.assign(heads_, {});
    c.Q.assign(heads_, {});
    c.Vpre.assign(heads_, std::vector<MatrixXd>(N));
    c.V.assign(heads_, std::vector<MatrixXd>(N));
    c.weights.assign(heads_, std::vector<MatrixXd>(N));

    const double scale = 1.0 / std::sqrt(static_cast<double>(key_dim_));
    std::vector<MatrixXd> z(N, MatrixXd::Zero(embed_, B));
    for (int m = 0; m < heads_; ++m) {
      const auto Wv = view(p, v_off_[m], value_dim_, embed_);
      for (std::size_t l = 0; l < N; ++l) {
        c.Vpre[m][l] = Wv * keys_src[l];
        c.V[m][l] = apply(Activation::leaky_relu, c.Vpre[m][l], slope_);
      }
      if (!uniform_) {
        const auto Wk = view(p, k_off_[m], key_dim_, embed_);
        const auto Wq = view(p, q_off_[m], key_dim_, embed_);
        c.K[m].resize(N);
        c.Q[m].resize(N);
        for (std::size_t l = 0; l < N; ++l) {
          c.K[m][l] = Wk * keys_src[l];
          c.Q[m][l] = Wq * query_src[l];
        }
      }
      for (std::size_t j = 0; j < N; ++j) {
        MatrixXd w = MatrixXd::Zero(N, B);
        if (uniform_) {
          const double u = 1.0 / static_cast<double>(N - 1);
          for (std::size_t l = 0; l < N; ++l) {
            if (l != j) w.row(l).setConstant(u);
          }
        } else {
          for (Eigen::Index b = 0; b < B; ++b) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < N; ++l) {
              if (l == j) continue;
              w(l, b) = scale * c.Q[m][j].col(b).dot(c.K[m][l].col(b));
              mx = std::max(mx, w(l, b));
            }
            double sum = 0.0;
            for (std::size_t l = 0; l < N; ++l) {
              if (l == j) continue;
              w(l, b) = std::exp(w(l, b) - mx);
              sum += w(l, b);
            }
            for (std::size_t l = 0; l < N; ++l) {
              if (l != j) w(l, b) /= sum;
            }
          }
        }
        auto zm = z[j].middleRows(m * value_dim_, value_dim_);
        for (std::size_t l = 0; l < N; ++l) {
          if (l == j) continue;
          zm += c.V[m][l] * w.row(l).asDiagonal();
        }
        c.weights[m][j] = std::move(w);
      }
    }
    return z;
  }

  // Accumulates parameter gradients; adds input gradients into d_keys_src and
  // d_query_src (which must be sized like the inputs).
  void backward(const ParamVector& p, const Cache& c, const std::vector<MatrixXd>& dz, Gradients& grad,
                std::vector<MatrixXd>& d_keys_src, std::vector<MatrixXd>& d_query_src) const {
    require(c.arch == this && c.params == p.data() && c.agents == dz.size(),
            "attention backward: cache does not match this forward pass");
    const std::size_t N = c.agents;
    const Eigen::Index B = c.keys_src[0].cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(key_dim_));
    for (int m = 0; m < heads_; ++m) {
      std::vector<MatrixXd> dV(N, MatrixXd::Zero(value_dim_, B));
      std::vector<MatrixXd> dK, dQ;
      if (!uniform_) {
        dK.assign(N, MatrixXd::Zero(key_dim_, B));
        dQ.assign(N, MatrixXd::Zero(key_dim_, B));
      }
      for (std::size_t j = 0; j < N; ++j) {
        const MatrixXd dzm = dz[j].middleRows(m * value_dim_, value_dim_);
        const MatrixXd& w = c.weights[m][j];
        for (std::size_t l = 0; l < N; ++l) {
          if (l != j) dV[l] += dzm * w.row(l).asDiagonal();
        }
        if (uniform_) continue;
        for (Eigen::Index b = 0; b < B; ++b) {
          // d weight_l = dz . V_l, then through the softmax
          double dot_sum = 0.0;
          Eigen::VectorXd dw = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
          for (std::size_t l = 0; l < N; ++l) {
            if (l == j) continue;
            dw[l] = dzm.col(b).dot(c.V[m][l].col(b));
            dot_sum += w(l, b) * dw[l];
          }
          for (std::size_t l = 0; l < N; ++l) {
            if (l == j) continue;
            const double dlogit = w(l, b) * (dw[l] - dot_sum) * scale;
            dQ[j].col(b) += dlogit * c.K[m][l].col(b);
            dK[l].col(b) += dlogit * c.Q[m][j].col(b);
          }
        }
      }
      const auto Wv = view(p, v_off_[m], value_dim_, embed_);
      auto gWv = view(grad, v_off_[m], value_dim_, embed_);
      for (std::size_t l = 0; l < N; ++l) {
        const MatrixXd dVpre = apply_grad(Activation::leaky_relu, c.Vpre[m][l], dV[l], slope_);
        gWv.noalias() += dVpre * c.keys_src[l].transpose();
        d_keys_src[l].noalias() += Wv.transpose() * dVpre;
      }
      if (!uniform_) {
        const auto Wk = view(p, k_off_[m], key_dim_, embed_);
        const auto Wq = view(p, q_off_[m], key_dim_, embed_);
        auto gWk = view(grad, k_off_[m], key_dim_, embed_);
        auto gWq = view(grad, q_off_[m], key_dim_, embed_);
        for (std::size_t l = 0; l < N; ++l) {
          gWk.noalias() += dK[l] * c.keys_src[l].transpose();
          gWq.noalias() += dQ[l] * c.query_src[l].transpose();
          d_keys_src[l].noalias() += Wk.transpose() * dK[l];
          d_query_src[l].noalias() += Wq.transpose() * dQ[l];
        }
      }
    }
  }

  // Weights that agent `query` assigns to `keys` under head `head`, for single
  // embeddings. The returned vector follows the order of `keys`.
  VectorXd weights(const ParamVector& p, int head, const VectorXd& query, const std::vector<VectorXd>& keys) const {
    require(head >= 0 && head < heads_, "attention: head index out of range");
    require(!keys.empty(), "attention: need at least one other agent");
    const auto n = static_cast<Eigen::Index>(keys.size());
    if (uniform_) return VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const auto Wk = view(p, k_off_[head], key_dim_, embed_);
    const auto Wq = view(p, q_off_[head], key_dim_, embed_);
    const VectorXd q = Wq * query;
    VectorXd logits(n);
    for (Eigen::Index l = 0; l < n; ++l) {
      require(keys[l].size() == embed_, "attention: key embedding dimension mismatch");
      logits[l] = (Wk * keys[l]).dot(q) / std::sqrt(static_cast<double>(key_dim_));
    }
    return softmax(logits);
  }

  // z_j for a single set of embeddings (one column each).
  VectorXd contribution(const ParamVector& p, std::size_t j, const std::vector<VectorXd>& keys_src,
                        const std::vector<VectorXd>& query_src) const {
    std::vector<MatrixXd> ks(keys_src.begin(), keys_src.end());
    std::vector<MatrixXd> qs(query_src.begin(), query_src.end());
    require(j < ks.size(), "attention: agent index out of range");
    return forward(p, ks, qs)[j].col(0);
  }

  Eigen::Index key_offset(int head) const { return k_off_.at(head); }
  Eigen::Index query_offset(int head) const { return q_off_.at(head); }
  Eigen::Index value_offset(int head) const { return v_off_.at(head); }

 private:
  int embed_ = 0, heads_ = 1, key_dim_ = 1, value_dim_ = 1;
  double slope_ = 0.01;
  bool uniform_ = false;
  std::vector<Eigen::Index> k_off_, q_off_, v_off_;
};

}  // namespace ehmarl::approx
