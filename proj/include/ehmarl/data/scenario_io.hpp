#pragma once

#include <filesystem>
#include <string>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/text.hpp"
#include "ehmarl/data/profile.hpp"
#include "ehmarl/data/series_io.hpp"
#include "ehmarl/env/park.hpp"

namespace ehmarl::data {

// Scenario file: `key = value` lines, '#' comments. Energies accept a kWh or
// MWh suffix (plain numbers are kWh). Exactly one of `series` (CSV path) or
// `profile` (ProfileSpec path) supplies the exogenous data; relative paths
// resolve against the scenario file's directory.
//
//   name, hubs, eta_ce, eta_de, eta_ch, eta_dh, eta_pg, eta_hg, eta_bg,
//   b_max, w_max, c_e_max, d_e_max, c_h_max, d_h_max, e_chp_max, h_chp_max,
//   h_b_max, e_max, g_max, e_o_max, b1, b2, zeta, b_init, w_init, lagrange,
//   obs_energy_unit, series | profile, horizon, demand_scale, pv_scale
//
// horizon truncates the series; demand_scale and pv_scale multiply the
// demand columns and PV (used to grow demand with the hub count).
inline Scenario scenario_from_text(const KeyValueText& kv, const std::filesystem::path& base_dir) {
  Scenario sc;
  sc.name = kv.str_or("name", sc.name);
  const long hubs = kv.integer_or("hubs", 1);
  if (hubs < 1) throw LoadError(kv.origin() + ": hubs must be >= 1");
  sc.hubs = static_cast<std::size_t>(hubs);

  HubParams& p = sc.hub;
  p.eta_ce = kv.num_or("eta_ce", p.eta_ce);
  p.eta_de = kv.num_or("eta_de", p.eta_de);
  p.eta_ch = kv.num_or("eta_ch", p.eta_ch);
  p.eta_dh = kv.num_or("eta_dh", p.eta_dh);
  p.eta_pg = kv.num_or("eta_pg", p.eta_pg);
  p.eta_hg = kv.num_or("eta_hg", p.eta_hg);
  p.eta_bg = kv.num_or("eta_bg", p.eta_bg);
  p.b_max = kv.energy_kwh_or("b_max", p.b_max);
  p.w_max = kv.energy_kwh_or("w_max", p.w_max);
  p.c_e_max = kv.energy_kwh_or("c_e_max", p.c_e_max);
  p.d_e_max = kv.energy_kwh_or("d_e_max", p.d_e_max);
  p.c_h_max = kv.energy_kwh_or("c_h_max", p.c_h_max);
  p.d_h_max = kv.energy_kwh_or("d_h_max", p.d_h_max);
  p.e_chp_max = kv.energy_kwh_or("e_chp_max", p.e_chp_max);
  p.h_chp_max = kv.energy_kwh_or("h_chp_max", p.h_chp_max);
  p.h_b_max = kv.energy_kwh_or("h_b_max", p.h_b_max);

  MarketParams& m = sc.market;
  m.e_max = kv.energy_kwh_or("e_max", m.e_max);
  m.g_max = kv.energy_kwh_or("g_max", m.g_max);
  m.e_o_max = kv.energy_kwh_or("e_o_max", m.e_o_max);
  m.b1 = kv.num_or("b1", m.b1);
  m.b2 = kv.num_or("b2", m.b2);

  sc.zeta = kv.num_or("zeta", sc.zeta);
  sc.b_init = kv.energy_kwh_or("b_init", sc.b_init);
  sc.w_init = kv.energy_kwh_or("w_init", sc.w_init);
  sc.lagrange = kv.integer_or("lagrange", 1) != 0;
  sc.obs_energy_unit = kv.energy_kwh_or("obs_energy_unit", sc.obs_energy_unit);

  const bool has_series = kv.has("series"), has_profile = kv.has("profile");
  if (has_series == has_profile) throw LoadError(kv.origin() + ": give exactly one of 'series' or 'profile'");
  const auto resolve = [&](const std::string& rel) {
    std::filesystem::path f(rel);
    return (f.is_absolute() ? f : base_dir / f).string();
  };
  sc.series = has_series ? load_series(resolve(kv.str("series"))) : generate_series(load_profile(resolve(kv.str("profile"))));

  const long horizon = kv.integer_or("horizon", 0);
  if (horizon < 0 || static_cast<std::size_t>(horizon) > sc.series.horizon()) {
    throw LoadError(kv.origin() + ": horizon must lie in [1, " + std::to_string(sc.series.horizon()) + "]");
  }
  if (horizon > 0) {
    for (auto* col : {&sc.series.p_e, &sc.series.p_g, &sc.series.p_o, &sc.series.demand_e, &sc.series.demand_g,
                      &sc.series.demand_h, &sc.series.pv}) {
      col->resize(static_cast<std::size_t>(horizon));
    }
  }
  const double ds = kv.num_or("demand_scale", 1.0), ps = kv.num_or("pv_scale", 1.0);
  if (ds < 0.0 || ps < 0.0) throw LoadError(kv.origin() + ": demand_scale and pv_scale must be >= 0");
  for (auto* col : {&sc.series.demand_e, &sc.series.demand_g, &sc.series.demand_h}) {
    for (double& v : *col) v *= ds;
  }
  for (double& v : sc.series.pv) v *= ps;

  kv.reject_unused();
  try {
    sc.validate();
  } catch (const ContractViolation& e) {
    throw LoadError(kv.origin() + ": " + e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  const auto kv = KeyValueText::load(path);
  return scenario_from_text(kv, std::filesystem::path(path).parent_path());
}

}  // namespace ehmarl::data
