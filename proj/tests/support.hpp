#pragma once
// Helpers shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ehmarl/ehmarl.hpp"

namespace ehmarl::testing {

// Central difference of f along coordinate i.
inline double central_difference(const std::function<double(const approx::ParamVector&)>& f,
                                 approx::ParamVector p, Eigen::Index i, double h = 1e-6) {
  const double x = p[i];
  p[i] = x + h;
  const double up = f(p);
  p[i] = x - h;
  const double down = f(p);
  return (up - down) / (2.0 * h);
}

// |a-b| / max(|a|, |b|, floor). The floor keeps coordinates with a vanishing
// derivative from dominating the comparison.
inline double rel_error(double a, double b, double floor = 1e-7) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// A one-hub scenario built in code; demand and prices are constant unless
// the caller edits the series.
inline Scenario flat_scenario(std::size_t T, std::size_t hubs = 1) {
  Scenario sc;
  sc.name = "flat";
  sc.hubs = hubs;
  for (std::size_t t = 0; t < T; ++t) {
    SlotData x;
    x.p_e = 0.6;
    x.p_g = 0.3;
    x.p_o = 0.3;
    x.demand_e = 1500.0 * static_cast<double>(hubs);
    x.demand_h = 1000.0 * static_cast<double>(hubs);
    x.demand_g = 100.0 * static_cast<double>(hubs);
    x.pv = 300.0 * static_cast<double>(hubs);
    sc.series.push_back(x);
  }
  return sc;
}

inline Scenario zero_scenario(std::size_t T) {
  Scenario sc = flat_scenario(T);
  for (std::size_t t = 0; t < T; ++t) {
    sc.series.demand_e[t] = sc.series.demand_h[t] = sc.series.demand_g[t] = sc.series.pv[t] = 0.0;
  }
  sc.b_init = sc.w_init = 0.0;
  return sc;
}

// A random minibatch with valid observations and actions.
inline marl::Minibatch random_minibatch(const std::vector<int>& action_counts, Eigen::Index B, Rng& rng) {
  std::vector<marl::Transition> items(static_cast<std::size_t>(B));
  for (auto& tr : items) {
    for (std::size_t j = 0; j < action_counts.size(); ++j) {
      AgentObservation o, n;
      for (std::size_t d = 0; d < kObsDim; ++d) {
        o.v[d] = uniform(rng, -1.0, 1.0);
        n.v[d] = uniform(rng, -1.0, 1.0);
      }
      tr.obs.push_back(o);
      tr.next_obs.push_back(n);
      tr.actions.push_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(action_counts[j]))));
      tr.rewards.push_back(uniform(rng, -2.0, 1.0));
    }
    tr.terminal = uniform01(rng) < 0.2;
  }
  std::vector<const marl::Transition*> ptr;
  for (const auto& tr : items) ptr.push_back(&tr);
  return marl::Minibatch::from(ptr);
}

inline marl::TrainConfig micro_config() {
  marl::TrainConfig cfg;
  cfg.embed_dim = 8;
  cfg.heads = 2;
  cfg.critic_hidden = {6};
  cfg.actor_hidden = {6};
  cfg.minibatch = 4;
  cfg.buffer = 16;
  return cfg;
}

}  // namespace ehmarl::testing
