#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/random.hpp"
#include "ehmarl/core/text.hpp"
#include "ehmarl/env/types.hpp"

namespace ehmarl::data {

// Half-open hour interval [from, to) on the 24 h clock.
struct HourBand {
  double from = 0.0, to = 0.0;
  bool contains(double h) const { return h >= from && h < to; }
};

struct DemandPeak {
  double center = 12.0;  // hour
  double amplitude = 0.0;
  double width = 1.0;  // hours (standard deviation of the bump)
};

struct DemandShape {
  double base = 0.0;
  std::vector<DemandPeak> peaks;
  double noise = 0.0;    // relative standard deviation
  double quantum = 0.0;  // round to multiples of this, 0 = off
};

// Synthetic day profile: two-peak tariff, Gaussian demand bumps per carrier
// and a half-sine PV curve over the daylight window. One slot = one hour.
struct ProfileSpec {
  std::size_t horizon = 24;
  double start_hour = 0.0;
  std::uint64_t seed = 0;

  double offpeak = 0.35, shoulder = 0.65, peak = 1.05;  // electricity price levels
  std::vector<HourBand> peak_bands{{8, 11}, {17, 20}};
  std::vector<HourBand> shoulder_bands{{11, 17}, {20, 22}};
  double sell_price = 0.3;  // capped at p_e slot by slot
  double gas_price = 0.3;

  DemandShape elec{1500.0, {{10.0, 800.0, 2.0}, {19.0, 800.0, 2.0}}, 0.0, 0.0};
  DemandShape heat{1200.0, {{8.0, 500.0, 2.5}}, 0.0, 0.0};
  DemandShape gas{200.0, {}, 0.0, 0.0};

  double pv_peak = 800.0;
  double daylight_start = 6.0, daylight_end = 18.0;
  double cloud_noise = 0.0;  // PV reduced by up to this fraction

  void validate() const {
    require(horizon >= 1, "ProfileSpec: horizon must be >= 1");
    for (const auto* bands : {&peak_bands, &shoulder_bands}) {
      for (const auto& b : *bands) {
        require(b.from >= 0.0 && b.to <= 24.0 && b.from < b.to, "ProfileSpec: band boundaries must lie within 0-24 h");
      }
    }
    for (double v : {offpeak, shoulder, peak, sell_price, gas_price, pv_peak}) {
      require(v >= 0.0 && std::isfinite(v), "ProfileSpec: prices and PV peak must be >= 0");
    }
    for (const auto* d : {&elec, &heat, &gas}) {
      require(d->base >= 0.0 && d->noise >= 0.0 && d->quantum >= 0.0, "ProfileSpec: demand shape must be >= 0");
      for (const auto& p : d->peaks) {
        require(p.amplitude >= 0.0 && p.width > 0.0, "ProfileSpec: peak amplitudes >= 0 and widths > 0");
      }
    }
    require(cloud_noise >= 0.0 && cloud_noise <= 1.0, "ProfileSpec: cloud_noise must lie in [0,1]");
    require(daylight_start >= 0.0 && daylight_end <= 24.0 && daylight_start < daylight_end,
            "ProfileSpec: daylight window must lie within 0-24 h");
  }

  static ProfileSpec from_text(const KeyValueText& kv);
};

inline double hour_of(const ProfileSpec& s, std::size_t t) {
  return std::fmod(s.start_hour + static_cast<double>(t), 24.0);
}

inline double tariff(const ProfileSpec& s, double h) {
  for (const auto& b : s.peak_bands) {
    if (b.contains(h)) return s.peak;
  }
  for (const auto& b : s.shoulder_bands) {
    if (b.contains(h)) return s.shoulder;
  }
  return s.offpeak;
}

inline double demand_mean(const DemandShape& d, double h) {
  double v = d.base;
  for (const auto& p : d.peaks) {
    double dh = std::abs(h - p.center);
    dh = std::min(dh, 24.0 - dh);  // the day wraps around
    v += p.amplitude * std::exp(-0.5 * dh * dh / (p.width * p.width));
  }
  return v;
}

inline double pv_clear_sky(const ProfileSpec& s, double h) {
  if (h <= s.daylight_start || h >= s.daylight_end) return 0.0;
  return s.pv_peak * std::sin(std::numbers::pi * (h - s.daylight_start) / (s.daylight_end - s.daylight_start));
}

inline ExogenousSeries generate_series(const ProfileSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](const DemandShape& d, double h) {
    double v = demand_mean(d, h);
    if (d.noise > 0.0) v *= 1.0 + d.noise * normal(rng);
    v = std::max(0.0, v);
    if (d.quantum > 0.0) v = std::round(v / d.quantum) * d.quantum;
    return v;
  };
  ExogenousSeries s;
  for (std::size_t t = 0; t < spec.horizon; ++t) {
    const double h = hour_of(spec, t);
    SlotData x;
    x.p_e = tariff(spec, h);
    x.p_g = spec.gas_price;
    x.p_o = std::min(spec.sell_price, x.p_e);
    x.demand_e = draw(spec.elec, h);
    x.demand_h = draw(spec.heat, h);
    x.demand_g = draw(spec.gas, h);
    x.pv = pv_clear_sky(spec, h);
    if (spec.cloud_noise > 0.0) x.pv *= 1.0 - spec.cloud_noise * uniform01(rng);
    s.push_back(x);
  }
  s.validate();
  return s;
}

namespace detail {

inline std::vector<HourBand> parse_bands(const std::string& text, const std::string& key) {
  std::vector<HourBand> out;
  if (trim(text).empty() || trim(text) == "none") return out;
  for (const auto& part : split(text, ',')) {
    const auto ends = split(part, '-');
    if (ends.size() != 2) throw LoadError("key '" + key + "': expected bands like '8-11,17-20'");
    out.push_back({to_double(ends[0], key), to_double(ends[1], key)});
  }
  return out;
}

inline std::vector<DemandPeak> parse_peaks(const std::string& text, const std::string& key) {
  std::vector<DemandPeak> out;
  if (trim(text).empty() || trim(text) == "none") return out;
  for (const auto& part : split(text, ',')) {
    const auto f = split(part, ':');
    if (f.size() != 3) throw LoadError("key '" + key + "': expected peaks like 'hour:amplitude:width,...'");
    out.push_back({to_double(f[0], key), to_double(f[1], key), to_double(f[2], key)});
  }
  return out;
}

inline void read_demand(const KeyValueText& kv, const std::string& carrier, DemandShape& d) {
  d.base = kv.energy_kwh_or(carrier + "_base", d.base);
  if (kv.has(carrier + "_peaks")) d.peaks = parse_peaks(kv.str(carrier + "_peaks"), carrier + "_peaks");
  d.noise = kv.num_or(carrier + "_noise", d.noise);
  d.quantum = kv.energy_kwh_or(carrier + "_quantum", d.quantum);
}

}  // namespace detail

// Keys mirror the fields; energies accept kWh/MWh suffixes. Example:
//   horizon = 24
//   peak_bands = 8-11,17-20
//   elec_peaks = 10:800:2, 19:800:2
inline ProfileSpec ProfileSpec::from_text(const KeyValueText& kv) {
  ProfileSpec s;
  s.horizon = static_cast<std::size_t>(kv.integer_or("horizon", static_cast<long>(s.horizon)));
  s.start_hour = kv.num_or("start_hour", s.start_hour);
  s.seed = static_cast<std::uint64_t>(kv.integer_or("seed", 0));
  s.offpeak = kv.num_or("offpeak", s.offpeak);
  s.shoulder = kv.num_or("shoulder", s.shoulder);
  s.peak = kv.num_or("peak", s.peak);
  if (kv.has("peak_bands")) s.peak_bands = detail::parse_bands(kv.str("peak_bands"), "peak_bands");
  if (kv.has("shoulder_bands")) s.shoulder_bands = detail::parse_bands(kv.str("shoulder_bands"), "shoulder_bands");
  s.sell_price = kv.num_or("sell_price", s.sell_price);
  s.gas_price = kv.num_or("gas_price", s.gas_price);
  detail::read_demand(kv, "elec", s.elec);
  detail::read_demand(kv, "heat", s.heat);
  detail::read_demand(kv, "gas", s.gas);
  s.pv_peak = kv.energy_kwh_or("pv_peak", s.pv_peak);
  s.daylight_start = kv.num_or("daylight_start", s.daylight_start);
  s.daylight_end = kv.num_or("daylight_end", s.daylight_end);
  s.cloud_noise = kv.num_or("cloud_noise", s.cloud_noise);
  kv.reject_unused();
  s.validate();
  return s;
}

inline ProfileSpec load_profile(const std::string& path) { return ProfileSpec::from_text(KeyValueText::load(path)); }

}  // namespace ehmarl::data
