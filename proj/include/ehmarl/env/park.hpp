#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/text.hpp"
#include "ehmarl/env/physics.hpp"
#include "ehmarl/env/types.hpp"

namespace ehmarl {

inline constexpr std::size_t kObsDim = 10;

// Index map of AgentObservation. Bumping the layout changes the tag, which
// makes older checkpoints incompatible.
inline constexpr const char* kObservationLayout =
    "obs-v1:sin24,cos24,p_e,p_g,p_o,demand_e,demand_h,demand_g,pv,own";

struct AgentObservation {
  std::array<double, kObsDim> v{};

  double operator[](std::size_t i) const { return v[i]; }
  double own() const { return v[kObsDim - 1]; }
};

enum class CapacityMode { soft, strict };

// Immutable description of a park: identical hubs sharing one market.
struct Scenario {
  std::string name = "scenario";
  std::size_t hubs = 1;
  HubParams hub;
  MarketParams market;
  ExogenousSeries series;
  double zeta = 1e-4;  // Lagrange update rate per kWh of violation
  double b_init = 2000.0;
  double w_init = 2000.0;
  bool lagrange = true;
  // Observations express energies in units of this many kWh per hub.
  double obs_energy_unit = 1000.0;

  std::size_t agents() const { return hubs * kDevicesPerHub; }
  std::size_t horizon() const { return series.horizon(); }

  void validate() const {
    require(hubs >= 1, "Scenario: at least one hub");
    hub.validate();
    market.validate();
    series.validate();
    require(zeta > 0.0, "Scenario: zeta must be positive");
    require(b_init >= 0.0 && w_init >= 0.0, "Scenario: initial levels must be >= 0");
    require(obs_energy_unit > 0.0, "Scenario: obs_energy_unit must be positive");
  }

  // Content hash over everything that influences outcomes.
  std::string fingerprint() const {
    std::string blob;
    auto add = [&](double v) { blob += fmt_double(v) + ","; };
    add(static_cast<double>(hubs));
    for (double v : {hub.eta_ce, hub.eta_de, hub.eta_ch, hub.eta_dh, hub.eta_pg, hub.eta_hg, hub.eta_bg, hub.b_max,
                     hub.w_max, hub.c_e_max, hub.d_e_max, hub.c_h_max, hub.d_h_max, hub.e_chp_max, hub.h_chp_max,
                     hub.h_b_max, market.e_max, market.g_max, market.e_o_max, market.b1, market.b2, zeta, b_init,
                     w_init, obs_energy_unit}) {
      add(v);
    }
    for (const auto* col : {&series.p_e, &series.p_g, &series.p_o, &series.demand_e, &series.demand_g,
                            &series.demand_h, &series.pv}) {
      for (double v : *col) add(v);
      blob += ";";
    }
    return hex64(fnv1a(blob));
  }
};

// Deterministic park simulator. step() is a pure function of its arguments
// and the scenario; instances hold no mutable state.
class Park {
 public:
  explicit Park(Scenario scenario) : sc_(std::move(scenario)) { sc_.validate(); }

  const Scenario& scenario() const { return sc_; }
  std::size_t agents() const { return sc_.agents(); }
  std::size_t hubs() const { return sc_.hubs; }
  std::size_t horizon() const { return sc_.horizon(); }

  ParkState initial_state() const {
    HubState h;
    h.b = sc_.b_init;
    h.w = sc_.w_init;
    return ParkState(sc_.hubs, h);
  }

  StepOutcome step(const ParkState& state, const JointAction& action, std::size_t t,
                   CapacityMode mode = CapacityMode::soft) const {
    StepOutcome out;
    step(state, action, t, out, mode);
    return out;
  }

  // Reuses the buffers of `out`.
  void step(const ParkState& state, const JointAction& action, std::size_t t, StepOutcome& out,
            CapacityMode mode = CapacityMode::soft) const {
    if (t >= horizon()) {
      throw EpisodeExhausted("slot " + std::to_string(t) + " is past the horizon " + std::to_string(horizon()));
    }
    require(state.size() == sc_.hubs, "Park::step: state has wrong hub count");
    require(action.index.size() == agents(), "Park::step: joint action has wrong agent count");
    const bool strict = mode == CapacityMode::strict;
    const HubParams& p = sc_.hub;
    const SlotData x = sc_.series.at(t);

    out.dispatch.resize(sc_.hubs);
    for (std::size_t k = 0; k < sc_.hubs; ++k) {
      out.dispatch[k] = resolve_dispatch(p, state[k], action.at(k, DeviceKind::battery),
                                         action.at(k, DeviceKind::tank), action.at(k, DeviceKind::chp),
                                         action.at(k, DeviceKind::boiler), strict);
    }
    balance_market(out.dispatch, x, sc_.market, out);
    out.reward = park_reward(out, x, sc_.market);
    out.market_cost = market_cost(out, x);

    out.next_state.resize(sc_.hubs);
    out.agent_rewards.assign(agents(), out.reward);
    out.violations = 0;
    for (std::size_t k = 0; k < sc_.hubs; ++k) {
      const HubState& s = state[k];
      const HubDispatch& d = out.dispatch[k];
      HubState& n = out.next_state[k];
      n.b = std::max(0.0, storage_step(s.b, d.c_e, d.d_e, p.eta_ce, p.eta_de));
      n.w = std::max(0.0, storage_step(s.w, d.c_h, d.d_h, p.eta_ch, p.eta_dh));
      n.chp_prev = d.frac_chp;
      n.boiler_prev = d.frac_boiler;
      if (sc_.lagrange) {
        // The multiplier in force this slot prices the level the action
        // produced, and that same level drives the update, so a violation in
        // the last slot still reaches the multiplier.
        out.agent_rewards[k * kDevicesPerHub + 0] = penalized_reward(out.reward, n.b, p.b_max, s.lambda_b);
        out.agent_rewards[k * kDevicesPerHub + 1] = penalized_reward(out.reward, n.w, p.w_max, s.lambda_w);
        n.lambda_b = update_lagrange(s.lambda_b, n.b, p.b_max, sc_.zeta);
        n.lambda_w = update_lagrange(s.lambda_w, n.w, p.w_max, sc_.zeta);
      } else {
        n.lambda_b = s.lambda_b;
        n.lambda_w = s.lambda_w;
      }
      if (strict) {
        out.violations += d.attempted_violations;
      } else {
        out.violations += (n.b > p.b_max + 1e-9) + (n.w > p.w_max + 1e-9);
      }
    }
  }

  AgentObservation observe(const ParkState& state, std::size_t t, std::size_t agent) const {
    require(agent < agents(), "observe: agent id out of range");
    require(t < horizon(), "observe: slot past the horizon");
    const SlotData x = sc_.series.at(t);
    const double unit = sc_.obs_energy_unit * static_cast<double>(sc_.hubs);
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / 24.0;
    AgentObservation o;
    o.v = {std::sin(phase), std::cos(phase), x.p_e, x.p_g, x.p_o,
           x.demand_e / unit, x.demand_h / unit, x.demand_g / unit, x.pv / unit, 0.0};
    const HubState& h = state[agent_hub(agent)];
    switch (agent_kind(agent)) {
      case DeviceKind::battery: o.v[9] = sc_.hub.b_max > 0.0 ? h.b / sc_.hub.b_max : 0.0; break;
      case DeviceKind::tank: o.v[9] = sc_.hub.w_max > 0.0 ? h.w / sc_.hub.w_max : 0.0; break;
      case DeviceKind::chp: o.v[9] = h.chp_prev; break;
      case DeviceKind::boiler: o.v[9] = h.boiler_prev; break;
    }
    return o;
  }

 private:
  Scenario sc_;
};

}  // namespace ehmarl
