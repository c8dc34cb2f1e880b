#pragma once

#include <cmath>
#include <vector>

#include "ehmarl/approx/categorical.hpp"
#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/random.hpp"
#include "ehmarl/marl/actors.hpp"
#include "ehmarl/marl/critic.hpp"
#include "ehmarl/marl/replay.hpp"

namespace ehmarl::marl {

// b(s, a_K) = sum_a pi(a|s_j) Q_j(s, (a, a_K))
inline double counterfactual_baseline(const VectorXd& probs, const VectorXd& q) {
  require(probs.size() == q.size(), "counterfactual_baseline: policy and Q-vector lengths differ");
  return probs.dot(q);
}

// A_j(s, (a, a_K)) for every candidate action a of agent j.
inline VectorXd advantages(const VectorXd& probs, const VectorXd& q) {
  return q.array() - counterfactual_baseline(probs, q);
}

// Polyak averaging; tau = 1 copies.
inline void target_update(const ParamVector& live, ParamVector& target, double tau) {
  require(live.size() == target.size(), "target_update: shapes differ");
  require(tau > 0.0 && tau <= 1.0, "target_update: tau must lie in (0,1]");
  if (tau == 1.0) {
    target = live;
  } else {
    target = (1.0 - tau) * target + tau * live;
  }
}

// Policy outputs for a batch of observations: probabilities and log-probabilities.
struct PolicyBatch {
  MatrixXd probs, logp;  // (actions x B)
};

inline PolicyBatch evaluate_policy(const approx::CategoricalPolicy& pol, const ParamVector& params,
                                   const MatrixXd& obs) {
  const MatrixXd logits = pol.logits(params, obs);
  PolicyBatch pb;
  pb.logp = approx::log_softmax_cols(logits);
  pb.probs = pb.logp.array().exp();
  return pb;
}

inline std::vector<int> sample_columns(const MatrixXd& probs, Rng& rng) {
  std::vector<int> out(static_cast<std::size_t>(probs.cols()));
  for (Eigen::Index b = 0; b < probs.cols(); ++b) {
    out[static_cast<std::size_t>(b)] =
        sample_categorical(std::span<const double>(probs.col(b).data(), static_cast<std::size_t>(probs.rows())), rng);
  }
  return out;
}

// Bootstrapped targets
//   y_j = r_j + gamma (1 - done) sum_a pi'_j(a|s'_j) (Q'_j(s', (a, a'_K))[a] - rho log pi'_j(a|s'_j))
// with a'_K drawn from the target policies. The sum over agent j's own next
// action is exact.
inline std::vector<VectorXd> critic_targets(const CriticEnsemble& critic, const ActorSet& actors,
                                            const Minibatch& mb, const TrainConfig& cfg, Rng& rng) {
  const std::size_t N = mb.agents();
  require(N == critic.net->agents() && N == actors.agents(), "critic_targets: agent count mismatch");
  require(mb.size() > 0, "critic_targets: empty minibatch");
  std::vector<PolicyBatch> next(N);
  std::vector<std::vector<int>> next_actions(N);
  for (std::size_t j = 0; j < N; ++j) {
    next[j] = evaluate_policy(actors.policy(j), actors.target[j], mb.next_obs[j]);
    next_actions[j] = sample_columns(next[j].probs, rng);
  }
  const auto q_next = critic.net->forward(critic.target, mb.next_obs, next_actions);
  std::vector<VectorXd> y(N);
  for (std::size_t j = 0; j < N; ++j) {
    const MatrixXd soft = q_next[j] - cfg.entropy * next[j].logp;
    const VectorXd v = next[j].probs.cwiseProduct(soft).colwise().sum().transpose();
    y[j] = mb.rewards[j].array() + cfg.gamma * (1.0 - mb.terminal.array()) * v.array();
  }
  return y;
}

struct CriticLossResult {
  double loss = 0.0;
  Gradients grad;
  CriticCache cache;
};

// L = sum_j mean_b (Q_j(s_b, a_b) - y_jb)^2 and its exact gradient.
inline CriticLossResult critic_loss_given_targets(const CriticNet& net, const ParamVector& params,
                                                  const Minibatch& mb, const std::vector<VectorXd>& y) {
  const std::size_t N = net.agents();
  require(y.size() == N && mb.agents() == N, "critic_loss: agent count mismatch");
  const Eigen::Index B = mb.size();
  require(B > 0, "critic_loss: empty minibatch");
  CriticLossResult res;
  const auto q = net.forward(params, mb.obs, mb.actions, &res.cache);
  std::vector<MatrixXd> dq(N);
  for (std::size_t j = 0; j < N; ++j) {
    dq[j] = MatrixXd::Zero(q[j].rows(), B);
    for (Eigen::Index b = 0; b < B; ++b) {
      const int a = mb.actions[j][static_cast<std::size_t>(b)];
      const double err = q[j](a, b) - y[j][b];
      res.loss += err * err / static_cast<double>(B);
      dq[j](a, b) = 2.0 * err / static_cast<double>(B);
    }
  }
  if (!std::isfinite(res.loss)) throw TrainingDivergence("critic loss is not finite");
  res.grad = Gradients::Zero(params.size());
  net.backward(params, res.cache, dq, res.grad);
  return res;
}

inline CriticLossResult critic_loss(const CriticEnsemble& critic, const ActorSet& actors, const Minibatch& mb,
                                    const TrainConfig& cfg, Rng& rng) {
  const auto y = critic_targets(critic, actors, mb, cfg, rng);
  return critic_loss_given_targets(*critic.net, critic.live, mb, y);
}

struct SurrogateResult {
  double value = 0.0;
  Gradients grad;  // d value / d params
};

// J(theta) = mean_b w_b log pi_theta(a_b | o_b), with the weights held fixed.
inline SurrogateResult actor_surrogate(const approx::CategoricalPolicy& pol, const ParamVector& params,
                                       const MatrixXd& obs, const std::vector<int>& actions, const VectorXd& weights) {
  const Eigen::Index B = obs.cols();
  require(static_cast<Eigen::Index>(actions.size()) == B && weights.size() == B,
          "actor_surrogate: batch sizes differ");
  approx::MlpCache cache;
  const MatrixXd logits = pol.logits(params, obs, &cache);
  const MatrixXd logp = approx::log_softmax_cols(logits);
  SurrogateResult res;
  MatrixXd dlogits = -logp.array().exp().matrix();  // -pi
  for (Eigen::Index b = 0; b < B; ++b) {
    const int a = actions[static_cast<std::size_t>(b)];
    require(a >= 0 && a < logits.rows(), "actor_surrogate: action out of range");
    res.value += weights[b] * logp(a, b) / static_cast<double>(B);
    dlogits(a, b) += 1.0;
    dlogits.col(b) *= weights[b] / static_cast<double>(B);
  }
  res.grad = Gradients::Zero(params.size());
  pol.net().backward(params, cache, dlogits, res.grad);
  return res;
}

struct ActorGradientResult {
  std::vector<Gradients> grad;   // ascent directions, one per agent
  std::vector<double> surrogate;  // J_j
  std::vector<double> entropy;    // mean policy entropy on the batch
  CriticCache cache;              // critic pass used for the advantages
};

// Soft counterfactual policy gradient. At each replayed state every agent's
// action is drawn fresh from its current policy; agent j's log-probability
// gradient is weighted by Q_j(s, (a_j, a_K)) - rho log pi_j(a_j|s_j) - b(s, a_K).
inline ActorGradientResult actor_gradient(const ActorSet& actors, const CriticEnsemble& critic, const Minibatch& mb,
                                          const TrainConfig& cfg, Rng& rng) {
  const std::size_t N = mb.agents();
  require(N == critic.net->agents() && N == actors.agents(), "actor_gradient: agent count mismatch");
  const Eigen::Index B = mb.size();
  std::vector<PolicyBatch> cur(N);
  std::vector<std::vector<int>> sampled(N);
  for (std::size_t j = 0; j < N; ++j) {
    cur[j] = evaluate_policy(actors.policy(j), actors.live[j], mb.obs[j]);
    sampled[j] = sample_columns(cur[j].probs, rng);
  }
  ActorGradientResult res;
  const auto q = critic.net->forward(critic.live, mb.obs, sampled, &res.cache);
  for (std::size_t j = 0; j < N; ++j) {
    VectorXd w(B);
    double ent = 0.0;
    for (Eigen::Index b = 0; b < B; ++b) {
      const int a = sampled[j][static_cast<std::size_t>(b)];
      const VectorXd probs = cur[j].probs.col(b);
      const VectorXd qb = q[j].col(b);
      w[b] = qb[a] - cfg.entropy * cur[j].logp(a, b) - counterfactual_baseline(probs, qb);
      ent -= probs.dot(cur[j].logp.col(b)) / static_cast<double>(B);
    }
    auto s = actor_surrogate(actors.policy(j), actors.live[j], mb.obs[j], sampled[j], w);
    if (!s.grad.allFinite()) throw TrainingDivergence("actor gradient is not finite");
    res.grad.push_back(std::move(s.grad));
    res.surrogate.push_back(s.value);
    res.entropy.push_back(ent);
  }
  return res;
}

}  // namespace ehmarl::marl
