#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ehmarl/approx/checkpoint.hpp"
#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/text.hpp"
#include "ehmarl/env/park.hpp"
#include "ehmarl/marl/actors.hpp"
#include "ehmarl/marl/config.hpp"

namespace ehmarl::marl {

enum class PolicyMode { greedy, sampled };

inline const char* policy_mode_name(PolicyMode m) { return m == PolicyMode::greedy ? "greedy" : "sampled"; }

inline PolicyMode policy_mode_from_name(const std::string& s) {
  if (s == "greedy") return PolicyMode::greedy;
  if (s == "sampled") return PolicyMode::sampled;
  throw ContractViolation("unknown evaluation mode '" + s + "'");
}

// One rollout, costs decomposed into the reward's market and mismatch terms.
struct EvalReport {
  std::string scenario;  // fingerprint
  std::string scenario_name;
  std::string algo = "scripted";
  std::string mode = "greedy";
  bool strict = true;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;

  double electricity_cost = 0.0;  // sum e_buy p_e
  double gas_cost = 0.0;          // sum g_buy p_g
  double sale_revenue = 0.0;      // sum e_sell p_o
  double mismatch_penalty = 0.0;  // sum b2 (mismatch_e + mismatch_g + mismatch_h)
  double utility = 0.0;           // sum b1
  double total_cost = 0.0;        // electricity + gas - sales
  double objective_cost = 0.0;    // total_cost + mismatch_penalty = -(sum reward - sum b1)
  double total_reward = 0.0;
  int violations = 0;

  std::vector<int> actions;  // (slot-major) joint action indices
  std::vector<StepOutcome> slots;
  std::vector<ParkState> states;  // state before each slot

  std::vector<std::pair<std::string, std::string>> entries() const {
    return {{"scenario", scenario},
            {"scenario_name", scenario_name},
            {"algo", algo},
            {"mode", mode},
            {"strict", strict ? "1" : "0"},
            {"seed", std::to_string(seed)},
            {"horizon", std::to_string(horizon)},
            {"electricity_cost", fmt_double(electricity_cost)},
            {"gas_cost", fmt_double(gas_cost)},
            {"sale_revenue", fmt_double(sale_revenue)},
            {"mismatch_penalty", fmt_double(mismatch_penalty)},
            {"utility", fmt_double(utility)},
            {"total_cost", fmt_double(total_cost)},
            {"objective_cost", fmt_double(objective_cost)},
            {"total_reward", fmt_double(total_reward)},
            {"violations", std::to_string(violations)}};
  }

  // Key-value summary; the per-slot table goes to dispatch_csv().
  std::string to_text() const {
    std::string s = "# ehmarl evaluation report\n";
    for (const auto& [k, v] : entries()) s += k + " = " + v + "\n";
    return s;
  }

  static EvalReport from_text(const std::string& text, const std::string& origin) {
    const auto kv = KeyValueText::parse(text, origin);
    EvalReport r;
    r.scenario = kv.str("scenario");
    r.scenario_name = kv.str_or("scenario_name", "");
    r.algo = kv.str("algo");
    r.mode = kv.str_or("mode", "greedy");
    r.strict = kv.num_or("strict", 1.0) != 0.0;
    r.seed = static_cast<std::uint64_t>(kv.integer_or("seed", 0));
    r.horizon = static_cast<std::size_t>(kv.integer_or("horizon", 0));
    r.electricity_cost = kv.num_or("electricity_cost", 0.0);
    r.gas_cost = kv.num_or("gas_cost", 0.0);
    r.sale_revenue = kv.num_or("sale_revenue", 0.0);
    r.mismatch_penalty = kv.num_or("mismatch_penalty", 0.0);
    r.utility = kv.num_or("utility", 0.0);
    r.total_cost = kv.num("total_cost");
    r.objective_cost = kv.num("objective_cost");
    r.total_reward = kv.num_or("total_reward", 0.0);
    r.violations = static_cast<int>(kv.integer_or("violations", 0));
    return r;
  }

  static EvalReport load(const std::string& path) { return from_text(read_file(path), path); }
};

inline std::string dispatch_header() {
  return "t,hub,a_batt,a_tank,a_chp,a_boiler,b,w,c_e,d_e,c_h,d_h,g_chp,e_chp,h_chp,g_boiler,h_boiler,"
         "pv,demand_e,demand_g,demand_h,p_e,p_g,p_o,e_buy,e_sell,g_buy,mismatch_e,mismatch_g,mismatch_h,"
         "reward,market_cost";
}

// One row per (slot, hub); market columns repeat across hubs of a slot.
inline std::string dispatch_csv(const EvalReport& r, const Scenario& sc) {
  std::string out = dispatch_header() + "\n";
  for (std::size_t t = 0; t < r.slots.size(); ++t) {
    const StepOutcome& o = r.slots[t];
    const SlotData x = sc.series.at(t);
    for (std::size_t k = 0; k < o.dispatch.size(); ++k) {
      const HubDispatch& d = o.dispatch[k];
      const HubState& s = r.states[t][k];
      std::string row = std::to_string(t) + "," + std::to_string(k);
      for (double v : {d.frac_batt, d.frac_tank, d.frac_chp, d.frac_boiler, s.b, s.w, d.c_e, d.d_e, d.c_h, d.d_h,
                       d.g_chp, d.e_chp, d.h_chp, d.g_boiler, d.h_boiler, x.pv, x.demand_e, x.demand_g, x.demand_h,
                       x.p_e, x.p_g, x.p_o, o.e_buy, o.e_sell, o.g_buy, o.mismatch_e, o.mismatch_g, o.mismatch_h,
                       o.reward, o.market_cost}) {
        row += "," + fmt_double(v);
      }
      out += row + "\n";
    }
  }
  return out;
}

// Chooses the joint action for slot t. Learned policies route through
// DecentralizedPolicy so each agent sees only its own observation.
using ActionSource = std::function<JointAction(const Park&, const ParkState&, std::size_t)>;

inline EvalReport rollout(const Park& park, const ActionSource& source, bool strict) {
  EvalReport r;
  const Scenario& sc = park.scenario();
  r.scenario = sc.fingerprint();
  r.scenario_name = sc.name;
  r.strict = strict;
  r.horizon = park.horizon();
  ParkState state = park.initial_state();
  for (std::size_t t = 0; t < park.horizon(); ++t) {
    const JointAction a = source(park, state, t);
    StepOutcome o = park.step(state, a, t, strict ? CapacityMode::strict : CapacityMode::soft);
    const SlotData x = sc.series.at(t);
    r.electricity_cost += o.e_buy * x.p_e;
    r.gas_cost += o.g_buy * x.p_g;
    r.sale_revenue += o.e_sell * x.p_o;
    r.mismatch_penalty += sc.market.b2 * (o.mismatch_e + o.mismatch_g + o.mismatch_h);
    r.utility += sc.market.b1;
    r.total_cost += o.market_cost;
    r.total_reward += o.reward;
    r.violations += o.violations;
    r.actions.insert(r.actions.end(), a.index.begin(), a.index.end());
    r.states.push_back(state);
    state = o.next_state;
    r.slots.push_back(std::move(o));
  }
  r.objective_cost = r.total_cost + r.mismatch_penalty;
  return r;
}

// Replays a fixed slot-major action sequence.
inline ActionSource scripted(std::vector<JointAction> plan) {
  auto shared = std::make_shared<const std::vector<JointAction>>(std::move(plan));
  return [shared](const Park&, const ParkState&, std::size_t t) {
    require(t < shared->size(), "scripted policy: plan shorter than the horizon");
    return (*shared)[t];
  };
}

// Rebuilds the per-agent executors stored in a checkpoint.
inline std::vector<DecentralizedPolicy> load_policies(const approx::Checkpoint& ck, const Park& park) {
  if (ck.layout != kObservationLayout) {
    throw IncompatibleCheckpoint("checkpoint observation layout '" + ck.layout + "' does not match '" +
                                 kObservationLayout + "'");
  }
  const std::size_t N = park.agents();
  if (ck.get_meta("agents") != std::to_string(N)) {
    throw IncompatibleCheckpoint("checkpoint has " + ck.get_meta("agents") + " agents, scenario has " +
                                 std::to_string(N));
  }
  std::vector<int> counts(N);
  for (std::size_t j = 0; j < N; ++j) counts[j] = action_count(agent_kind(j));
  if (ck.get_meta("action_counts") != join_ints(counts)) {
    throw IncompatibleCheckpoint("checkpoint action spaces do not match the scenario's devices");
  }
  std::vector<int> hidden;
  double slope = 0.01;
  try {
    hidden = parse_ints(ck.get_meta("config.actor_hidden"));
    slope = to_double(ck.get_meta("config.leaky_slope"), "config.leaky_slope");
  } catch (const LoadError& e) {
    throw IncompatibleCheckpoint(e.what());
  }
  std::vector<DecentralizedPolicy> out;
  for (std::size_t j = 0; j < N; ++j) {
    auto net = std::make_shared<ActorNet>();
    net->policy = approx::CategoricalPolicy(net->layout, "actor" + std::to_string(j), static_cast<int>(kObsDim),
                                            hidden, counts[j], slope);
    ParamVector p = ck.load_params("actor" + std::to_string(j) + "/", net->layout);
    out.emplace_back(std::move(net), std::move(p));
  }
  return out;
}

inline ActionSource policy_source(std::vector<DecentralizedPolicy> policies, PolicyMode mode, std::uint64_t seed) {
  auto pols = std::make_shared<const std::vector<DecentralizedPolicy>>(std::move(policies));
  auto rng = std::make_shared<Rng>(seed);
  return [pols, rng, mode](const Park& park, const ParkState& state, std::size_t t) {
    require(pols->size() == park.agents(), "policy_source: agent count mismatch");
    JointAction a(std::vector<int>(pols->size(), 0));
    for (std::size_t j = 0; j < pols->size(); ++j) {
      a.index[j] = (*pols)[j].act(park.observe(state, t, j), mode == PolicyMode::sampled ? rng.get() : nullptr);
    }
    return a;
  };
}

inline EvalReport evaluate(const approx::Checkpoint& ck, const Park& park, PolicyMode mode, bool strict,
                           std::uint64_t seed = 0) {
  auto pols = load_policies(ck, park);
  EvalReport r = rollout(park, policy_source(std::move(pols), mode, seed), strict);
  r.algo = ck.has_meta("algo") ? ck.get_meta("algo") : "unknown";
  r.mode = policy_mode_name(mode);
  r.seed = ck.has_meta("config.seed") ? static_cast<std::uint64_t>(std::stoull(ck.get_meta("config.seed"))) : seed;
  return r;
}

}  // namespace ehmarl::marl
