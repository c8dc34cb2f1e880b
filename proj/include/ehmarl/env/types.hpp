#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ehmarl/core/errors.hpp"

namespace ehmarl {

// Device parameters of one energy hub. Energies in kWh per slot.
struct HubParams {
  double eta_ce = 0.98;  // battery charge
  double eta_de = 0.98;  // battery discharge
  double eta_ch = 0.98;  // tank charge
  double eta_dh = 0.98;  // tank discharge
  double eta_pg = 0.35;  // CHP gas -> electricity
  double eta_hg = 0.35;  // CHP gas -> heat
  double eta_bg = 0.80;  // boiler gas -> heat

  double b_max = 4000.0;
  double w_max = 4000.0;
  double c_e_max = 1000.0;
  double d_e_max = 1000.0;
  double c_h_max = 1000.0;
  double d_h_max = 1000.0;
  double e_chp_max = 1000.0;
  double h_chp_max = 1000.0;
  double h_b_max = 1000.0;

  // Gas input that drives the CHP to its caps.
  double chp_gas_max() const { return e_chp_max / eta_pg; }
  double boiler_gas_max() const { return h_b_max / eta_bg; }

  void validate() const {
    for (double eta : {eta_ce, eta_de, eta_ch, eta_dh, eta_pg, eta_hg, eta_bg}) {
      require(eta > 0.0 && eta <= 1.0, "HubParams: efficiencies must lie in (0,1]");
    }
    for (double cap : {b_max, w_max, c_e_max, d_e_max, c_h_max, d_h_max, e_chp_max, h_chp_max, h_b_max}) {
      require(cap >= 0.0 && std::isfinite(cap), "HubParams: capacities and caps must be >= 0");
    }
    require(std::abs(e_chp_max / eta_pg - h_chp_max / eta_hg) <= 1e-9 * std::max(1.0, e_chp_max / eta_pg),
            "HubParams: e_chp_max/eta_pg and h_chp_max/eta_hg must describe the same gas cap");
  }
};

struct MarketParams {
  double e_max = 5000.0;    // electricity purchase limit
  double g_max = 20000.0;   // gas purchase limit
  double e_o_max = 3000.0;  // electricity sale limit
  double b1 = 20.0;
  double b2 = 2.0;

  void validate() const {
    for (double v : {e_max, g_max, e_o_max, b2}) {
      require(v >= 0.0 && std::isfinite(v), "MarketParams: limits and b2 must be >= 0");
    }
    require(std::isfinite(b1), "MarketParams: b1 must be finite");
  }
};

// Per-hub dynamic state. Levels may exceed their caps in soft-capacity mode.
struct HubState {
  double b = 0.0;
  double w = 0.0;
  double lambda_b = 0.0;
  double lambda_w = 0.0;
  // Last dispatch fractions of the conversion devices (observation signal).
  double chp_prev = 0.0;
  double boiler_prev = 0.0;

  bool operator==(const HubState&) const = default;
};

using ParkState = std::vector<HubState>;

// Exogenous values of a single slot.
struct SlotData {
  double p_e = 0.0, p_g = 0.0, p_o = 0.0;
  double demand_e = 0.0, demand_g = 0.0, demand_h = 0.0;
  double pv = 0.0;
};

struct ExogenousSeries {
  std::vector<double> p_e, p_g, p_o;
  std::vector<double> demand_e, demand_g, demand_h;
  std::vector<double> pv;

  std::size_t horizon() const { return p_e.size(); }

  SlotData at(std::size_t t) const {
    return SlotData{p_e[t], p_g[t], p_o[t], demand_e[t], demand_g[t], demand_h[t], pv[t]};
  }

  void push_back(const SlotData& d) {
    p_e.push_back(d.p_e);
    p_g.push_back(d.p_g);
    p_o.push_back(d.p_o);
    demand_e.push_back(d.demand_e);
    demand_g.push_back(d.demand_g);
    demand_h.push_back(d.demand_h);
    pv.push_back(d.pv);
  }

  bool operator==(const ExogenousSeries&) const = default;

  // Returns an empty string when valid, otherwise a description of the first
  // violation naming the offending row.
  std::string check() const {
    const std::size_t T = p_e.size();
    if (T == 0) return "series is empty";
    const std::array<const std::vector<double>*, 7> cols{&p_e, &p_g, &p_o, &demand_e, &demand_g, &demand_h, &pv};
    const std::array<const char*, 7> names{"p_e", "p_g", "p_o", "demand_e", "demand_g", "demand_h", "pv"};
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c]->size() != T) return std::string("column ") + names[c] + " length mismatch";
    }
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const double v = (*cols[c])[t];
        if (!std::isfinite(v) || v < 0.0) {
          return "row t=" + std::to_string(t) + ": " + names[c] + " must be finite and >= 0";
        }
      }
      if (p_o[t] > p_e[t]) return "row t=" + std::to_string(t) + ": p_o exceeds p_e";
    }
    return {};
  }

  void validate() const {
    auto msg = check();
    require(msg.empty(), "ExogenousSeries: " + msg);
  }
};

enum class DeviceKind { battery = 0, tank = 1, chp = 2, boiler = 3 };

inline constexpr int kDevicesPerHub = 4;
inline constexpr std::array<DeviceKind, 4> kHubDevices{DeviceKind::battery, DeviceKind::tank, DeviceKind::chp,
                                                       DeviceKind::boiler};

inline constexpr int action_count(DeviceKind kind) {
  return (kind == DeviceKind::battery || kind == DeviceKind::tank) ? 21 : 11;
}

inline const char* device_name(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::battery: return "battery";
    case DeviceKind::tank: return "tank";
    case DeviceKind::chp: return "chp";
    case DeviceKind::boiler: return "boiler";
  }
  return "?";
}

inline DeviceKind device_from_name(const std::string& name) {
  for (auto k : kHubDevices) {
    if (name == device_name(k)) return k;
  }
  throw ContractViolation("unknown device kind '" + name + "'");
}

// Agent ids are laid out hub-major: agent = 4*hub + device.
inline DeviceKind agent_kind(std::size_t agent) { return kHubDevices[agent % kDevicesPerHub]; }
inline std::size_t agent_hub(std::size_t agent) { return agent / kDevicesPerHub; }

// Discrete action indices, one per agent in hub-major order.
struct JointAction {
  std::vector<int> index;

  JointAction() = default;
  explicit JointAction(std::vector<int> idx) : index(std::move(idx)) {}

  static JointAction idle(std::size_t hubs) {
    JointAction a;
    a.index.resize(hubs * kDevicesPerHub);
    for (std::size_t i = 0; i < a.index.size(); ++i) {
      a.index[i] = (agent_kind(i) == DeviceKind::battery || agent_kind(i) == DeviceKind::tank) ? 10 : 0;
    }
    return a;
  }

  static JointAction of(std::initializer_list<int> idx) { return JointAction(std::vector<int>(idx)); }

  std::size_t hubs() const { return index.size() / kDevicesPerHub; }
  int at(std::size_t hub, DeviceKind kind) const {
    return index[hub * kDevicesPerHub + static_cast<std::size_t>(kind)];
  }
};

// Physical flows of one hub in one slot after decoding and clamping.
struct HubDispatch {
  double frac_batt = 0.0, frac_tank = 0.0, frac_chp = 0.0, frac_boiler = 0.0;
  double c_e = 0.0, d_e = 0.0;
  double c_h = 0.0, d_h = 0.0;
  double g_chp = 0.0, e_chp = 0.0, h_chp = 0.0;
  double g_boiler = 0.0, h_boiler = 0.0;
  int attempted_violations = 0;  // strict mode: requested charge above headroom
};

struct StepOutcome {
  double e_buy = 0.0, e_sell = 0.0, g_buy = 0.0;
  double e_tot = 0.0, g_tot = 0.0, h_tot = 0.0;
  double mismatch_e = 0.0, mismatch_g = 0.0, mismatch_h = 0.0;
  double reward = 0.0;
  std::vector<double> agent_rewards;
  std::vector<HubDispatch> dispatch;
  ParkState next_state;
  int violations = 0;

  // Purchases minus sales at the slot's prices.
  double market_cost = 0.0;
};

}  // namespace ehmarl
