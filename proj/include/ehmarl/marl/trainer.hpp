#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ehmarl/approx/checkpoint.hpp"
#include "ehmarl/approx/optimizer.hpp"
#include "ehmarl/env/park.hpp"
#include "ehmarl/marl/actors.hpp"
#include "ehmarl/marl/config.hpp"
#include "ehmarl/marl/critic.hpp"
#include "ehmarl/marl/losses.hpp"
#include "ehmarl/marl/replay.hpp"

namespace ehmarl::marl {

struct EpisodeMetrics {
  int episode = 0;
  double mean_reward = 0.0;  // per slot, unscaled
  double total_cost = 0.0;   // market cost summed over the episode
  double lambda_b = 0.0;     // mean over slots and hubs
  double lambda_w = 0.0;
  int violations = 0;
  double critic_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> actor_loss, entropy;
  double attn_min = std::numeric_limits<double>::quiet_NaN();
  double attn_max = std::numeric_limits<double>::quiet_NaN();
};

inline std::string metrics_header(std::size_t agents) {
  std::string h = "episode,mean_reward,total_cost,lambda_b,lambda_w,violations,critic_loss";
  for (std::size_t j = 0; j < agents; ++j) h += ",actor_loss_" + std::to_string(j);
  for (std::size_t j = 0; j < agents; ++j) h += ",entropy_" + std::to_string(j);
  return h + ",attn_min,attn_max";
}

inline std::string metrics_row(const EpisodeMetrics& m) {
  std::string r = std::to_string(m.episode);
  for (double v : {m.mean_reward, m.total_cost, m.lambda_b, m.lambda_w}) r += "," + fmt_double(v);
  r += "," + std::to_string(m.violations) + "," + fmt_double(m.critic_loss);
  for (double v : m.actor_loss) r += "," + fmt_double(v);
  for (double v : m.entropy) r += "," + fmt_double(v);
  return r + "," + fmt_double(m.attn_min) + "," + fmt_double(m.attn_max);
}

inline std::vector<int> park_action_counts(std::size_t agents) {
  std::vector<int> n(agents);
  for (std::size_t j = 0; j < agents; ++j) n[j] = action_count(agent_kind(j));
  return n;
}

inline MatrixXd obs_column(const AgentObservation& o) {
  return Eigen::Map<const VectorXd>(o.v.data(), static_cast<Eigen::Index>(kObsDim));
}

struct TrainResult {
  approx::Checkpoint checkpoint;
  std::vector<EpisodeMetrics> metrics;
  ActorSet actors;
  CriticEnsemble critic;
};

// Soft counterfactual actor-critic over a park. Single-threaded; every random
// draw comes from one generator seeded with cfg.seed.
class Trainer {
 public:
  Trainer(const Park& park, TrainConfig cfg, CriticKind kind)
      : park_(park), cfg_(std::move(cfg)), kind_(kind), rng_(cfg_.seed), buffer_(static_cast<std::size_t>(cfg_.buffer)) {
    cfg_.validate();
    const std::size_t T = park_.horizon();
    horizon_ = cfg_.horizon > 0 ? static_cast<std::size_t>(cfg_.horizon) : T;
    require(horizon_ <= T, "train: horizon exceeds the scenario series");
    const auto counts = park_action_counts(park_.agents());
    critic_ = CriticEnsemble::create(kind_, counts, static_cast<int>(kObsDim), cfg_, rng_);
    actors_ = ActorSet::create(counts, static_cast<int>(kObsDim), cfg_.actor_hidden, cfg_.leaky_slope, rng_);
    critic_opt_ = approx::OptimizerState::adam(critic_.live.size(), cfg_.critic_lr);
    for (const auto& p : actors_.live) actor_opt_.push_back(approx::OptimizerState::adam(p.size(), cfg_.actor_lr));
    carry_ = park_.initial_state();
  }

  const ActorSet& actors() const { return actors_; }
  const CriticEnsemble& critic() const { return critic_; }
  std::size_t updates() const { return updates_; }

  EpisodeMetrics run_episode(int episode) {
    const std::size_t N = park_.agents();
    const std::size_t H = park_.hubs();
    EpisodeMetrics m;
    m.episode = episode;
    m.actor_loss.assign(N, 0.0);
    m.entropy.assign(N, 0.0);
    ParkState state = park_.initial_state();
    for (std::size_t k = 0; k < H; ++k) {
      state[k].lambda_b = carry_[k].lambda_b;
      state[k].lambda_w = carry_[k].lambda_w;
    }
    double critic_sum = 0.0;
    int n_updates = 0;
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    StepOutcome out;
    JointAction a(std::vector<int>(N, 0));
    for (std::size_t t = 0; t < horizon_; ++t) {
      slot_ = t;
      Transition tr;
      tr.slot = t;
      for (std::size_t j = 0; j < N; ++j) tr.obs.push_back(park_.observe(state, t, j));
      for (std::size_t j = 0; j < N; ++j) {
        // Local observation and own parameters only.
        const VectorXd p = actors_.policy(j).probabilities(actors_.live[j], VectorXd(obs_column(tr.obs[j])));
        a.index[j] = sample_categorical(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), rng_);
      }
      park_.step(state, a, t, out, CapacityMode::soft);
      tr.actions = a.index;
      for (double r : out.agent_rewards) tr.rewards.push_back(r * cfg_.reward_scale);
      tr.terminal = t + 1 == horizon_;
      for (std::size_t j = 0; j < N; ++j) {
        tr.next_obs.push_back(tr.terminal ? tr.obs[j] : park_.observe(out.next_state, t + 1, j));
      }
      buffer_.push(std::move(tr));

      m.mean_reward += out.reward;
      m.total_cost += out.market_cost;
      m.violations += out.violations;
      for (const auto& h : out.next_state) {
        m.lambda_b += h.lambda_b;
        m.lambda_w += h.lambda_w;
      }
      state = out.next_state;

      ++steps_;
      if (buffer_.size() >= static_cast<std::size_t>(std::max(cfg_.warmup, cfg_.minibatch)) &&
          steps_ % static_cast<std::size_t>(cfg_.update_every) == 0) {
        const auto u = update(episode);
        critic_sum += u.critic_loss;
        for (std::size_t j = 0; j < N; ++j) {
          m.actor_loss[j] += u.actor_loss[j];
          m.entropy[j] += u.entropy[j];
        }
        amin = std::min(amin, u.attn_min);
        amax = std::max(amax, u.attn_max);
        ++n_updates;
      }
    }
    carry_ = state;
    const double slots = static_cast<double>(horizon_);
    m.mean_reward /= slots;
    m.lambda_b /= slots * static_cast<double>(H);
    m.lambda_w /= slots * static_cast<double>(H);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (n_updates > 0) {
      m.critic_loss = critic_sum / n_updates;
      for (std::size_t j = 0; j < N; ++j) {
        m.actor_loss[j] /= n_updates;
        m.entropy[j] /= n_updates;
      }
      if (critic_.net->uses_attention()) {
        m.attn_min = amin;
        m.attn_max = amax;
      }
    } else {
      std::fill(m.actor_loss.begin(), m.actor_loss.end(), nan);
      std::fill(m.entropy.begin(), m.entropy.end(), nan);
    }
    return m;
  }

  approx::Checkpoint checkpoint() const {
    approx::Checkpoint ck;
    ck.layout = kObservationLayout;
    ck.set_meta("algo", critic_kind_name(kind_));
    ck.set_meta("hubs", std::to_string(park_.hubs()));
    ck.set_meta("agents", std::to_string(park_.agents()));
    ck.set_meta("action_counts", join_ints(park_action_counts(park_.agents())));
    ck.set_meta("scenario", park_.scenario().fingerprint());
    ck.set_meta("updates", std::to_string(updates_));
    for (const auto& [k, v] : cfg_.entries()) ck.set_meta("config." + k, v);
    for (std::size_t j = 0; j < actors_.agents(); ++j) {
      ck.add_params("actor" + std::to_string(j) + "/", actors_.nets[j]->layout, actors_.live[j]);
    }
    ck.add_params("critic/", critic_.net->layout(), critic_.live);
    return ck;
  }

 private:
  struct UpdateStats {
    double critic_loss = 0.0;
    std::vector<double> actor_loss, entropy;
    double attn_min = std::numeric_limits<double>::infinity();
    double attn_max = -std::numeric_limits<double>::infinity();
  };

  UpdateStats update(int episode) {
    try {
      return update_unchecked();
    } catch (const TrainingDivergence& e) {
      throw TrainingDivergence(std::string(e.what()) + "\n" + diagnostics(episode));
    }
  }

  UpdateStats update_unchecked() {
    UpdateStats s;
    const Minibatch mb = buffer_.sample(static_cast<std::size_t>(cfg_.minibatch), rng_);
    auto cl = critic_loss(critic_, actors_, mb, cfg_, rng_);
    approx::clip_by_norm(cl.grad, cfg_.critic_clip);
    approx::optimizer_step(critic_.live, cl.grad, critic_opt_);
    s.critic_loss = cl.loss;

    auto ag = actor_gradient(actors_, critic_, mb, cfg_, rng_);
    for (std::size_t j = 0; j < actors_.agents(); ++j) {
      Gradients g = -ag.grad[j];  // ascent on the surrogate
      approx::clip_by_norm(g, cfg_.actor_clip);
      approx::optimizer_step(actors_.live[j], g, actor_opt_[j]);
      s.actor_loss.push_back(-ag.surrogate[j]);
      s.entropy.push_back(ag.entropy[j]);
    }
    if (critic_.net->uses_attention()) {
      const std::size_t N = actors_.agents();
      for (const auto& head : critic_.net->attention_weights(ag.cache)) {
        for (std::size_t j = 0; j < N; ++j) {
          for (std::size_t l = 0; l < N; ++l) {
            if (l == j) continue;
            const auto row = head[j].row(static_cast<Eigen::Index>(l));
            s.attn_min = std::min(s.attn_min, row.minCoeff());
            s.attn_max = std::max(s.attn_max, row.maxCoeff());
          }
        }
      }
    }
    target_update(critic_.live, critic_.target, cfg_.tau);
    for (std::size_t j = 0; j < actors_.agents(); ++j) target_update(actors_.live[j], actors_.target[j], cfg_.tau);
    ++updates_;
    return s;
  }

  std::string diagnostics(int episode) const {
    std::string d = "training diverged at episode " + std::to_string(episode) + ", slot " + std::to_string(slot_) +
                    ", update " + std::to_string(updates_) + "\n";
    d += "  critic |phi| = " + fmt_double(critic_.live.norm()) +
         ", finite = " + (critic_.live.allFinite() ? "yes" : "no") + "\n";
    for (std::size_t j = 0; j < actors_.agents(); ++j) {
      d += "  actor" + std::to_string(j) + " |theta| = " + fmt_double(actors_.live[j].norm()) + "\n";
    }
    for (std::size_t k = 0; k < carry_.size(); ++k) {
      d += "  hub" + std::to_string(k) + " lambda_b = " + fmt_double(carry_[k].lambda_b) +
           ", lambda_w = " + fmt_double(carry_[k].lambda_w) + "\n";
    }
    return d;
  }

  const Park& park_;
  TrainConfig cfg_;
  CriticKind kind_;
  Rng rng_;
  ReplayBuffer buffer_;
  std::size_t horizon_ = 0;
  CriticEnsemble critic_;
  ActorSet actors_;
  approx::OptimizerState critic_opt_;
  std::vector<approx::OptimizerState> actor_opt_;
  ParkState carry_;
  std::size_t steps_ = 0, updates_ = 0, slot_ = 0;
};

inline TrainResult train(const Park& park, const TrainConfig& cfg, CriticKind kind,
                         const std::function<void(const EpisodeMetrics&)>& on_episode = {}) {
  Trainer tr(park, cfg, kind);
  TrainResult res;
  for (int e = 0; e < cfg.episodes; ++e) {
    res.metrics.push_back(tr.run_episode(e));
    if (on_episode) on_episode(res.metrics.back());
  }
  res.checkpoint = tr.checkpoint();
  res.actors = tr.actors();
  res.critic = tr.critic();
  return res;
}

}  // namespace ehmarl::marl
