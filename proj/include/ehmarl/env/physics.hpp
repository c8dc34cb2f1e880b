#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/env/types.hpp"

namespace ehmarl {

// Storage devices map indices 0..20 onto -1.0..+1.0; conversion devices map
// 0..10 onto 0.0..1.0. Values are exact decimal grid points.
inline double decode_action(int index, DeviceKind kind) {
  const int n = action_count(kind);
  if (index < 0 || index >= n) {
    throw ContractViolation("action index " + std::to_string(index) + " out of range for " + device_name(kind));
  }
  if (kind == DeviceKind::battery || kind == DeviceKind::tank) return static_cast<double>(index - 10) / 10.0;
  return static_cast<double>(index) / 10.0;
}

inline int encode_fraction(double fraction, DeviceKind kind) {
  const int offset = (kind == DeviceKind::battery || kind == DeviceKind::tank) ? 10 : 0;
  const int idx = static_cast<int>(std::lround(fraction * 10.0)) + offset;
  require(idx >= 0 && idx < action_count(kind), "fraction outside the action grid");
  return idx;
}

inline double storage_step(double level, double charge, double discharge, double eta_c, double eta_d) {
  require(charge >= 0.0 && discharge >= 0.0, "storage_step: flows must be non-negative");
  require(charge == 0.0 || discharge == 0.0, "storage_step: cannot charge and discharge in the same slot");
  return level + eta_c * charge - discharge / eta_d;
}

inline std::pair<double, double> chp_output(double gas_in, const HubParams& p) {
  require(gas_in >= 0.0, "chp_output: gas input must be non-negative");
  return {std::min(p.eta_pg * gas_in, p.e_chp_max), std::min(p.eta_hg * gas_in, p.h_chp_max)};
}

inline double boiler_output(double gas_in, const HubParams& p) {
  require(gas_in >= 0.0, "boiler_output: gas input must be non-negative");
  return std::min(p.eta_bg * gas_in, p.h_b_max);
}

// Resolves the four discrete actions of a hub into physical flows. Discharge
// is clamped so the level stays >= 0. In strict mode charging is clamped to
// the remaining headroom and the clamp is counted as an attempted violation.
inline HubDispatch resolve_dispatch(const HubParams& p, const HubState& s, int a_batt, int a_tank, int a_chp,
                                    int a_boiler, bool strict) {
  HubDispatch d;
  d.frac_batt = decode_action(a_batt, DeviceKind::battery);
  d.frac_tank = decode_action(a_tank, DeviceKind::tank);
  d.frac_chp = decode_action(a_chp, DeviceKind::chp);
  d.frac_boiler = decode_action(a_boiler, DeviceKind::boiler);

  auto storage = [&](double frac, double level, double cap, double c_max, double d_max, double eta_c,
                     double eta_d, double& c, double& dis) {
    if (frac > 0.0) {
      c = frac * c_max;
      if (strict) {
        const double headroom = std::max(0.0, (cap - level) / eta_c);
        if (c > headroom + 1e-9) ++d.attempted_violations;
        c = std::min(c, headroom);
      }
    } else if (frac < 0.0) {
      dis = std::min(-frac * d_max, std::max(0.0, level) * eta_d);
    }
  };
  storage(d.frac_batt, s.b, p.b_max, p.c_e_max, p.d_e_max, p.eta_ce, p.eta_de, d.c_e, d.d_e);
  storage(d.frac_tank, s.w, p.w_max, p.c_h_max, p.d_h_max, p.eta_ch, p.eta_dh, d.c_h, d.d_h);

  d.g_chp = d.frac_chp * p.chp_gas_max();
  std::tie(d.e_chp, d.h_chp) = chp_output(d.g_chp, p);
  d.g_boiler = d.frac_boiler * p.boiler_gas_max();
  d.h_boiler = boiler_output(d.g_boiler, p);
  return d;
}

// Settles the park against the utilities: electricity shortfall is bought and
// surplus sold, gas is bought for devices plus demand, heat has no market.
// Limits clamp; what they leave unserved shows up as mismatch.
inline void balance_market(std::span<const HubDispatch> hubs, const SlotData& x, const MarketParams& m,
                           StepOutcome& out) {
  double e_chp = 0.0, d_e = 0.0, c_e = 0.0, g_dev = 0.0, h_gen = 0.0;
  for (const auto& d : hubs) {
    e_chp += d.e_chp;
    d_e += d.d_e;
    c_e += d.c_e;
    g_dev += d.g_chp + d.g_boiler;
    h_gen += d.h_chp + d.h_boiler + d.d_h - d.c_h;
  }
  const double net_e = e_chp + x.pv + d_e - c_e;
  const double shortfall = x.demand_e - net_e;
  out.e_buy = shortfall > 0.0 ? std::min(shortfall, m.e_max) : 0.0;
  out.e_sell = shortfall < 0.0 ? std::min(-shortfall, m.e_o_max) : 0.0;
  out.g_buy = std::min(g_dev + x.demand_g, m.g_max);

  out.e_tot = net_e + out.e_buy - out.e_sell;
  out.g_tot = out.g_buy - g_dev;
  out.h_tot = h_gen;
  out.mismatch_e = std::abs(out.e_tot - x.demand_e);
  out.mismatch_g = std::abs(out.g_tot - x.demand_g);
  out.mismatch_h = std::abs(out.h_tot - x.demand_h);
}

inline StepOutcome balance_market(std::span<const HubDispatch> hubs, const SlotData& x, const MarketParams& m) {
  StepOutcome out;
  balance_market(hubs, x, m, out);
  return out;
}

inline double market_cost(const StepOutcome& o, const SlotData& x) {
  return o.e_buy * x.p_e + o.g_buy * x.p_g - o.e_sell * x.p_o;
}

inline double park_reward(const StepOutcome& o, const SlotData& x, const MarketParams& m) {
  return o.e_sell * x.p_o - o.e_buy * x.p_e - o.g_buy * x.p_g + m.b1 -
         m.b2 * (o.mismatch_e + o.mismatch_g + o.mismatch_h);
}

// Below the cap the term turns into a bonus.
inline double penalized_reward(double reward, double level, double cap, double lambda) {
  return reward - lambda * (level - cap);
}

inline double update_lagrange(double lambda, double level, double cap, double zeta) {
  require(zeta > 0.0, "update_lagrange: zeta must be positive");
  return std::clamp(lambda + zeta * (level - cap), 0.0, 1.0);
}

}  // namespace ehmarl
