#pragma once

#include <memory>
#include <vector>

#include "ehmarl/approx/categorical.hpp"
#include "ehmarl/core/random.hpp"
#include "ehmarl/env/park.hpp"
#include "ehmarl/marl/config.hpp"

namespace ehmarl::marl {

using approx::MatrixXd;
using approx::ParamVector;
using approx::VectorXd;

struct ActorNet {
  approx::ParamLayout layout;
  approx::CategoricalPolicy policy;
};

// Execution-side handle of one agent: its own policy network and parameters,
// nothing else. Action selection therefore reads only the agent's local
// observation.
class DecentralizedPolicy {
 public:
  DecentralizedPolicy(std::shared_ptr<const ActorNet> net, ParamVector params)
      : net_(std::move(net)), params_(std::move(params)) {}

  VectorXd probabilities(const AgentObservation& o) const {
    VectorXd x = Eigen::Map<const VectorXd>(o.v.data(), static_cast<Eigen::Index>(kObsDim));
    return net_->policy.probabilities(params_, x);
  }

  // rng == nullptr selects the most probable action (lowest index on ties).
  int act(const AgentObservation& o, Rng* rng) const {
    const VectorXd p = probabilities(o);
    if (!rng) {
      Eigen::Index best = 0;
      p.maxCoeff(&best);
      return static_cast<int>(best);
    }
    return sample_categorical(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), *rng);
  }

  int actions() const { return net_->policy.actions(); }

 private:
  std::shared_ptr<const ActorNet> net_;
  ParamVector params_;
};

// Per-agent policy parameters and their target copies.
struct ActorSet {
  std::vector<std::shared_ptr<ActorNet>> nets;
  std::vector<ParamVector> live, target;

  std::size_t agents() const { return nets.size(); }

  static ActorSet create(const std::vector<int>& action_counts, int obs_dim, const std::vector<int>& hidden,
                         double slope, Rng& rng) {
    ActorSet a;
    for (std::size_t j = 0; j < action_counts.size(); ++j) {
      auto net = std::make_shared<ActorNet>();
      net->policy = approx::CategoricalPolicy(net->layout, "actor" + std::to_string(j), obs_dim, hidden,
                                              action_counts[j], slope);
      a.live.push_back(net->layout.initialize(rng));
      a.target.push_back(a.live.back());
      a.nets.push_back(std::move(net));
    }
    return a;
  }

  const approx::CategoricalPolicy& policy(std::size_t j) const { return nets[j]->policy; }

  DecentralizedPolicy executor(std::size_t j) const { return DecentralizedPolicy(nets[j], live[j]); }
};

}  // namespace ehmarl::marl
