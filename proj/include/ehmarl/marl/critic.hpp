#pragma once

#include <memory>
#include <vector>

#include "ehmarl/approx/attention.hpp"
#include "ehmarl/approx/mlp.hpp"
#include "ehmarl/approx/params.hpp"
#include "ehmarl/core/random.hpp"
#include "ehmarl/marl/config.hpp"

namespace ehmarl::marl {

using approx::Gradients;
using approx::MatrixXd;
using approx::ParamVector;
using approx::VectorXd;

inline MatrixXd one_hot(const std::vector<int>& actions, int n) {
  MatrixXd m = MatrixXd::Zero(n, static_cast<Eigen::Index>(actions.size()));
  for (std::size_t b = 0; b < actions.size(); ++b) {
    require(actions[b] >= 0 && actions[b] < n, "one_hot: action index out of range");
    m(actions[b], static_cast<Eigen::Index>(b)) = 1.0;
  }
  return m;
}

struct CriticCache {
  const void* arch = nullptr;
  const double* params = nullptr;
  Eigen::Index batch = 0;
  std::vector<approx::MlpCache> sa_enc, obs_enc, head;
  approx::MultiHeadAttention::Cache attn;
};

// Centralized critic architecture. For every agent j it returns a vector with
// one Q value per action of j, holding the other agents' actions fixed:
//
//   attention / uniform_attention:
//     e_l = h_l(o_l, a_l), s_j = h_oj(o_j), z_j = attention(s_j, {e_l}_{l!=j}),
//     Q_j = g_j([s_j; z_j])
//   concat:       Q_j = g_j([o_1..o_N; a_l for l != j])
//   independent:  Q_j = g_j(o_j)
class CriticNet {
 public:
  CriticNet(CriticKind kind, std::vector<int> action_counts, int obs_dim, const TrainConfig& cfg)
      : kind_(kind), nA_(std::move(action_counts)), obs_dim_(obs_dim) {
    const std::size_t N = nA_.size();
    require(N >= 1, "CriticNet: need at least one agent");
    const bool attn = kind_ == CriticKind::attention || kind_ == CriticKind::uniform_attention;
    require(!attn || N >= 2, "CriticNet: attention critics need at least two agents");
    const int E = cfg.embed_dim;
    const double slope = cfg.leaky_slope;
    using approx::Activation;
    using approx::Mlp;
    for (std::size_t j = 0; j < N; ++j) {
      const std::string tag = "agent" + std::to_string(j);
      if (attn) {
        sa_enc_.emplace_back(layout_, tag + ".sa_enc", std::vector<int>{obs_dim + nA_[j], E},
                             std::vector<Activation>{Activation::leaky_relu}, slope);
        obs_enc_.emplace_back(layout_, tag + ".obs_enc", std::vector<int>{obs_dim, E},
                              std::vector<Activation>{Activation::leaky_relu}, slope);
      }
    }
    if (attn) {
      attention_ = approx::MultiHeadAttention(layout_, "attention", E, cfg.heads, cfg.effective_key_dim(), slope,
                                              kind_ == CriticKind::uniform_attention);
    }
    for (std::size_t j = 0; j < N; ++j) {
      const std::string tag = "agent" + std::to_string(j) + ".head";
      std::vector<int> hidden = cfg.critic_hidden;
      int in = 0;
      switch (kind_) {
        case CriticKind::attention:
        case CriticKind::uniform_attention: in = 2 * E; break;
        case CriticKind::concat:
          in = static_cast<int>(N) * obs_dim;
          for (std::size_t l = 0; l < N; ++l) {
            if (l != j) in += nA_[l];
          }
          hidden.insert(hidden.begin(), E);
          break;
        case CriticKind::independent:
          in = obs_dim;
          hidden.insert(hidden.begin(), E);
          break;
      }
      head_.push_back(Mlp::dense(layout_, tag, in, hidden, nA_[j], slope));
    }
  }

  CriticNet(const CriticNet&) = delete;
  CriticNet& operator=(const CriticNet&) = delete;

  CriticKind kind() const { return kind_; }
  std::size_t agents() const { return nA_.size(); }
  int actions(std::size_t j) const { return nA_[j]; }
  const std::vector<int>& action_counts() const { return nA_; }
  int obs_dim() const { return obs_dim_; }
  const approx::ParamLayout& layout() const { return layout_; }
  const approx::MultiHeadAttention& attention() const { return attention_; }
  bool uses_attention() const { return kind_ == CriticKind::attention || kind_ == CriticKind::uniform_attention; }

  // Whether Q_j reads anything of agents other than j.
  bool centralized() const { return kind_ != CriticKind::independent; }

  std::vector<MatrixXd> forward(const ParamVector& p, const std::vector<MatrixXd>& obs,
                                const std::vector<std::vector<int>>& actions, CriticCache* cache = nullptr) const {
    layout_.check(p, "CriticNet::forward");
    const std::size_t N = agents();
    require(obs.size() == N && actions.size() == N, "CriticNet::forward: one observation/action set per agent");
    const Eigen::Index B = obs[0].cols();
    for (std::size_t j = 0; j < N; ++j) {
      require(obs[j].rows() == obs_dim_ && obs[j].cols() == B &&
                  static_cast<Eigen::Index>(actions[j].size()) == B,
              "CriticNet::forward: dimension mismatch");
    }
    CriticCache local;
    CriticCache& c = cache ? *cache : local;
    c.arch = this;
    c.params = p.data();
    c.batch = B;
    c.head.assign(N, {});
    std::vector<MatrixXd> q(N);

    if (uses_attention()) {
      c.sa_enc.assign(N, {});
      c.obs_enc.assign(N, {});
      std::vector<MatrixXd> e(N), s(N);
      for (std::size_t l = 0; l < N; ++l) {
        MatrixXd in(obs_dim_ + nA_[l], B);
        in << obs[l], one_hot(actions[l], nA_[l]);
        e[l] = sa_enc_[l].forward(p, in, &c.sa_enc[l]);
        s[l] = obs_enc_[l].forward(p, obs[l], &c.obs_enc[l]);
      }
      const auto z = attention_.forward(p, e, s, &c.attn);
      for (std::size_t j = 0; j < N; ++j) {
        MatrixXd in(2 * attention_.embed_dim(), B);
        in << s[j], z[j];
        q[j] = head_[j].forward(p, in, &c.head[j]);
      }
    } else if (kind_ == CriticKind::concat) {
      for (std::size_t j = 0; j < N; ++j) {
        MatrixXd in(head_[j].in_dim(), B);
        Eigen::Index row = 0;
        for (std::size_t l = 0; l < N; ++l) {
          in.middleRows(row, obs_dim_) = obs[l];
          row += obs_dim_;
        }
        for (std::size_t l = 0; l < N; ++l) {
          if (l == j) continue;
          in.middleRows(row, nA_[l]) = one_hot(actions[l], nA_[l]);
          row += nA_[l];
        }
        q[j] = head_[j].forward(p, in, &c.head[j]);
      }
    } else {
      for (std::size_t j = 0; j < N; ++j) q[j] = head_[j].forward(p, obs[j], &c.head[j]);
    }
    return q;
  }

  // Accumulates sum_j <dQ_j, dQ_j/dparams> into grad.
  void backward(const ParamVector& p, const CriticCache& c, const std::vector<MatrixXd>& dq, Gradients& grad) const {
    require(c.arch == this && c.params == p.data(), "CriticNet::backward: cache does not match the parameters");
    require(grad.size() == layout_.size(), "CriticNet::backward: gradient has the wrong size");
    const std::size_t N = agents();
    require(dq.size() == N, "CriticNet::backward: one Q gradient per agent");
    if (!uses_attention()) {
      for (std::size_t j = 0; j < N; ++j) head_[j].backward(p, c.head[j], dq[j], grad);
      return;
    }
    const int E = attention_.embed_dim();
    const Eigen::Index B = c.batch;
    std::vector<MatrixXd> ds(N, MatrixXd::Zero(E, B)), de(N, MatrixXd::Zero(E, B)), dz(N);
    for (std::size_t j = 0; j < N; ++j) {
      const MatrixXd din = head_[j].backward(p, c.head[j], dq[j], grad);
      ds[j] += din.topRows(E);
      dz[j] = din.bottomRows(E);
    }
    attention_.backward(p, c.attn, dz, grad, de, ds);
    for (std::size_t j = 0; j < N; ++j) {
      obs_enc_[j].backward(p, c.obs_enc[j], ds[j], grad);
      sa_enc_[j].backward(p, c.sa_enc[j], de[j], grad);
    }
  }

  // Attention weights recorded in a cache: [head][query agent] (agents x B).
  const std::vector<std::vector<MatrixXd>>& attention_weights(const CriticCache& c) const {
    require(uses_attention(), "attention_weights: critic has no attention");
    return c.attn.weights;
  }

 private:
  CriticKind kind_;
  std::vector<int> nA_;
  int obs_dim_;
  approx::ParamLayout layout_;
  std::vector<approx::Mlp> sa_enc_, obs_enc_, head_;
  approx::MultiHeadAttention attention_;
};

// Live and target parameters of one critic architecture.
struct CriticEnsemble {
  std::shared_ptr<const CriticNet> net;
  ParamVector live;
  ParamVector target;

  static CriticEnsemble create(CriticKind kind, std::vector<int> action_counts, int obs_dim, const TrainConfig& cfg,
                               Rng& rng) {
    CriticEnsemble ce;
    ce.net = std::make_shared<const CriticNet>(kind, std::move(action_counts), obs_dim, cfg);
    ce.live = ce.net->layout().initialize(rng);
    ce.target = ce.live;
    return ce;
  }
};

}  // namespace ehmarl::marl
