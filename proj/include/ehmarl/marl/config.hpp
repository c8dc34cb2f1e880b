#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/text.hpp"

namespace ehmarl::marl {

// Structure of the centralized critic. `attention` is the proposed method;
// the others are the comparison ladder.
enum class CriticKind { attention, uniform_attention, concat, independent };

inline const char* critic_kind_name(CriticKind k) {
  switch (k) {
    case CriticKind::attention: return "proposed";
    case CriticKind::uniform_attention: return "uniform";
    case CriticKind::concat: return "concat";
    case CriticKind::independent: return "independent";
  }
  return "?";
}

inline CriticKind critic_kind_from_name(const std::string& s) {
  if (s == "proposed" || s == "attention") return CriticKind::attention;
  if (s == "uniform" || s == "uniform-attention") return CriticKind::uniform_attention;
  if (s == "concat" || s == "concat-critic") return CriticKind::concat;
  if (s == "independent") return CriticKind::independent;
  throw ContractViolation("unknown algorithm '" + s + "'");
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  for (const auto& part : split(s, ',')) {
    double v = 0.0;
    if (!parse_double(part, v) || v < 1 || v != static_cast<int>(v)) {
      throw LoadError("expected a comma-separated list of positive integers, got '" + s + "'");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct TrainConfig {
  double gamma = 0.95;
  double entropy = 0.01;  // entropy coefficient
  int heads = 4;
  int minibatch = 32;
  int buffer = 1000;
  double tau = 0.01;
  double critic_lr = 1e-3;
  double actor_lr = 3e-4;
  int episodes = 200;
  int horizon = 0;  // 0: full series
  std::uint64_t seed = 0;

  int warmup = 100;            // transitions stored before the first update
  int update_every = 1;        // slots between updates
  double reward_scale = 1e-3;  // applied inside the learner only
  int embed_dim = 128;         // critic encoder width
  int key_dim = 0;             // 0: embed_dim / heads
  std::vector<int> critic_hidden{128};
  std::vector<int> actor_hidden{64, 64};
  double leaky_slope = 0.01;
  double critic_clip = 10.0;  // gradient-norm clip, <= 0 disables
  double actor_clip = 1.0;

  int effective_key_dim() const { return key_dim > 0 ? key_dim : std::max(1, embed_dim / heads); }

  void validate() const {
    require(gamma > 0.0 && gamma < 1.0, "TrainConfig: gamma must lie in (0,1)");
    require(entropy >= 0.0, "TrainConfig: entropy coefficient must be >= 0");
    require(tau > 0.0 && tau <= 1.0, "TrainConfig: tau must lie in (0,1]");
    require(heads >= 1 && minibatch >= 1 && buffer >= minibatch, "TrainConfig: bad heads/minibatch/buffer");
    require(episodes >= 1 && horizon >= 0 && warmup >= 0 && update_every >= 1, "TrainConfig: bad loop bounds");
    require(critic_lr > 0.0 && actor_lr > 0.0 && reward_scale > 0.0, "TrainConfig: rates must be positive");
    require(embed_dim >= heads && embed_dim % heads == 0, "TrainConfig: embed_dim must be a multiple of heads");
  }

  static TrainConfig from_text(const KeyValueText& kv) {
    TrainConfig c;
    c.gamma = kv.num_or("gamma", c.gamma);
    c.entropy = kv.num_or("entropy", c.entropy);
    c.heads = static_cast<int>(kv.integer_or("heads", c.heads));
    c.minibatch = static_cast<int>(kv.integer_or("minibatch", c.minibatch));
    c.buffer = static_cast<int>(kv.integer_or("buffer", c.buffer));
    c.tau = kv.num_or("tau", c.tau);
    c.critic_lr = kv.num_or("critic_lr", c.critic_lr);
    c.actor_lr = kv.num_or("actor_lr", c.actor_lr);
    c.episodes = static_cast<int>(kv.integer_or("episodes", c.episodes));
    c.horizon = static_cast<int>(kv.integer_or("horizon", c.horizon));
    c.seed = static_cast<std::uint64_t>(kv.integer_or("seed", static_cast<long>(c.seed)));
    c.warmup = static_cast<int>(kv.integer_or("warmup", c.warmup));
    c.update_every = static_cast<int>(kv.integer_or("update_every", c.update_every));
    c.reward_scale = kv.num_or("reward_scale", c.reward_scale);
    c.embed_dim = static_cast<int>(kv.integer_or("embed_dim", c.embed_dim));
    c.key_dim = static_cast<int>(kv.integer_or("key_dim", c.key_dim));
    if (kv.has("critic_hidden")) c.critic_hidden = parse_ints(kv.str("critic_hidden"));
    if (kv.has("actor_hidden")) c.actor_hidden = parse_ints(kv.str("actor_hidden"));
    c.leaky_slope = kv.num_or("leaky_slope", c.leaky_slope);
    c.critic_clip = kv.num_or("critic_clip", c.critic_clip);
    c.actor_clip = kv.num_or("actor_clip", c.actor_clip);
    kv.reject_unused();
    c.validate();
    return c;
  }

  // Same key-value format as from_text.
  std::vector<std::pair<std::string, std::string>> entries() const {
    return {{"gamma", fmt_double(gamma)},
            {"entropy", fmt_double(entropy)},
            {"heads", std::to_string(heads)},
            {"minibatch", std::to_string(minibatch)},
            {"buffer", std::to_string(buffer)},
            {"tau", fmt_double(tau)},
            {"critic_lr", fmt_double(critic_lr)},
            {"actor_lr", fmt_double(actor_lr)},
            {"episodes", std::to_string(episodes)},
            {"horizon", std::to_string(horizon)},
            {"seed", std::to_string(seed)},
            {"warmup", std::to_string(warmup)},
            {"update_every", std::to_string(update_every)},
            {"reward_scale", fmt_double(reward_scale)},
            {"embed_dim", std::to_string(embed_dim)},
            {"key_dim", std::to_string(key_dim)},
            {"critic_hidden", join_ints(critic_hidden)},
            {"actor_hidden", join_ints(actor_hidden)},
            {"leaky_slope", fmt_double(leaky_slope)},
            {"critic_clip", fmt_double(critic_clip)},
            {"actor_clip", fmt_double(actor_clip)}};
  }

  std::string to_text() const {
    std::string s;
    for (const auto& [k, v] : entries()) s += k + " = " + v + "\n";
    return s;
  }
};

}  // namespace ehmarl::marl
