#pragma once

#include <Eigen/Dense>
#include <numeric>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/random.hpp"
#include "ehmarl/env/park.hpp"

namespace ehmarl::marl {

struct Transition {
  std::vector<AgentObservation> obs;
  std::vector<int> actions;
  std::vector<double> rewards;  // per agent, already scaled for learning
  std::vector<AgentObservation> next_obs;
  bool terminal = false;
  std::size_t slot = 0;

  std::size_t agents() const { return obs.size(); }
  bool consistent() const {
    const auto n = obs.size();
    return n > 0 && actions.size() == n && rewards.size() == n && next_obs.size() == n;
  }
};

// Column-batched view of sampled transitions, one matrix per agent.
struct Minibatch {
  std::vector<Eigen::MatrixXd> obs, next_obs;  // (kObsDim x B)
  std::vector<std::vector<int>> actions;       // [agent][b]
  std::vector<Eigen::VectorXd> rewards;        // [agent] (B)
  Eigen::VectorXd terminal;                    // 1.0 for terminal transitions

  Eigen::Index size() const { return terminal.size(); }
  std::size_t agents() const { return obs.size(); }

  static Minibatch from(const std::vector<const Transition*>& items) {
    require(!items.empty(), "Minibatch: no transitions");
    const std::size_t n = items.front()->agents();
    const auto B = static_cast<Eigen::Index>(items.size());
    Minibatch mb;
    mb.obs.assign(n, Eigen::MatrixXd(kObsDim, B));
    mb.next_obs.assign(n, Eigen::MatrixXd(kObsDim, B));
    mb.actions.assign(n, std::vector<int>(items.size()));
    mb.rewards.assign(n, Eigen::VectorXd(B));
    mb.terminal.resize(B);
    for (Eigen::Index b = 0; b < B; ++b) {
      const Transition& tr = *items[static_cast<std::size_t>(b)];
      require(tr.consistent() && tr.agents() == n, "Minibatch: inconsistent agent counts");
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t d = 0; d < kObsDim; ++d) {
          mb.obs[j](static_cast<Eigen::Index>(d), b) = tr.obs[j][d];
          mb.next_obs[j](static_cast<Eigen::Index>(d), b) = tr.next_obs[j][d];
        }
        mb.actions[j][static_cast<std::size_t>(b)] = tr.actions[j];
        mb.rewards[j][b] = tr.rewards[j];
      }
      mb.terminal[b] = tr.terminal ? 1.0 : 0.0;
    }
    return mb;
  }
};

// Fixed-capacity ring; the oldest transition is overwritten when full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    require(capacity > 0, "ReplayBuffer: capacity must be positive");
    items_.reserve(capacity);
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }

  void push(Transition t) {
    require(t.consistent(), "ReplayBuffer: transition has inconsistent agent counts");
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  const Transition& operator[](std::size_t i) const { return items_.at(i); }

  // Uniform sample of distinct indices (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const {
    require(count <= items_.size(), "ReplayBuffer: minibatch larger than the stored transitions");
    std::vector<std::size_t> idx(items_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + uniform_index(rng, idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
  }

  Minibatch sample(std::size_t count, Rng& rng) const {
    std::vector<const Transition*> picked;
    for (auto i : sample_indices(count, rng)) picked.push_back(&items_[i]);
    return Minibatch::from(picked);
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

}  // namespace ehmarl::marl
