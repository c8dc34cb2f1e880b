#pragma once

#include <string>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/marl/trainer.hpp"

namespace ehmarl::baselines {

// Comparison ladder: each rung swaps only the critic structure, the soft
// counterfactual actor update is shared.
enum class BaselineKind { independent, concat_critic, uniform_attention };

inline marl::CriticKind critic_for(BaselineKind k) {
  switch (k) {
    case BaselineKind::independent: return marl::CriticKind::independent;
    case BaselineKind::concat_critic: return marl::CriticKind::concat;
    case BaselineKind::uniform_attention: return marl::CriticKind::uniform_attention;
  }
  throw ContractViolation("unknown baseline kind");
}

inline const char* baseline_name(BaselineKind k) { return marl::critic_kind_name(critic_for(k)); }

inline BaselineKind baseline_from_name(const std::string& s) {
  switch (marl::critic_kind_from_name(s)) {
    case marl::CriticKind::independent: return BaselineKind::independent;
    case marl::CriticKind::concat: return BaselineKind::concat_critic;
    case marl::CriticKind::uniform_attention: return BaselineKind::uniform_attention;
    case marl::CriticKind::attention: break;
  }
  throw ContractViolation("'" + s + "' is the proposed learner, not a baseline");
}

inline marl::TrainResult run_baseline(BaselineKind kind, const Park& park, const marl::TrainConfig& cfg,
                                      const std::function<void(const marl::EpisodeMetrics&)>& on_episode = {}) {
  return marl::train(park, cfg, critic_for(kind), on_episode);
}

}  // namespace ehmarl::baselines
