#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/env/park.hpp"
#include "ehmarl/marl/evaluate.hpp"

namespace ehmarl::baselines {

enum class OracleMode { dp, enumerate };

struct OracleConfig {
  double step = 100.0;  // storage discretization, kWh
  OracleMode mode = OracleMode::dp;
  double budget = 2e9;  // max storage transitions (dp) or leaf sequences (enumerate)
};

struct OracleResult {
  double value = 0.0;           // max sum of park rewards on the grid model
  double objective_cost = 0.0;  // T b1 - value: market cost plus mismatch penalty
  std::vector<JointAction> schedule;
  marl::EvalReport replay;  // schedule replayed in the continuous strict-mode park
  double work = 0.0;        // transitions or sequences examined
};

// Grid model shared by both modes: storage levels live on multiples of
// `step`, every slot is simulated with the strict-capacity park, and the
// resulting levels snap to the nearest grid point. CHP and boiler settings do
// not influence the next state, so for each storage decision the best of them
// is found by brute force within the slot.
class StorageGrid {
 public:
  StorageGrid(const Park& park, double step) : park_(park), step_(step) {
    require(step > 0.0, "oracle: discretization step must be positive");
    const HubParams& p = park.scenario().hub;
    nb_ = points(p.b_max, "b_max");
    nw_ = points(p.w_max, "w_max");
  }

  std::size_t levels_b() const { return nb_; }
  std::size_t levels_w() const { return nw_; }
  std::size_t hub_states() const { return nb_ * nw_; }
  double step() const { return step_; }

  double states() const { return std::pow(static_cast<double>(hub_states()), static_cast<double>(park_.hubs())); }

  std::size_t snap(double level, std::size_t n) const {
    const long i = std::lround(level / step_);
    return static_cast<std::size_t>(std::clamp(i, 0L, static_cast<long>(n) - 1));
  }

  // Mixed-radix state index over hubs, each hub contributing (ib, iw).
  ParkState decode(std::size_t s) const {
    ParkState st(park_.hubs());
    for (auto& h : st) {
      const std::size_t hs = s % hub_states();
      s /= hub_states();
      h.b = static_cast<double>(hs / nw_) * step_;
      h.w = static_cast<double>(hs % nw_) * step_;
    }
    return st;
  }

  std::size_t encode(const ParkState& st) const {
    std::size_t s = 0;
    for (std::size_t k = st.size(); k-- > 0;) s = s * hub_states() + snap(st[k].b, nb_) * nw_ + snap(st[k].w, nw_);
    return s;
  }

 private:
  std::size_t points(double cap, const char* what) const {
    const double n = cap / step_;
    if (std::abs(n - std::round(n)) > 1e-9) {
      throw ContractViolation(std::string("oracle: ") + what + " is not a multiple of the discretization step");
    }
    return static_cast<std::size_t>(std::llround(n)) + 1;
  }

  const Park& park_;
  double step_;
  std::size_t nb_ = 0, nw_ = 0;
};

namespace detail {

inline constexpr int kStorageChoices = 21 * 21;
inline constexpr int kConversionChoices = 11 * 11;

inline double ipow(double b, std::size_t e) { return std::pow(b, static_cast<double>(e)); }

inline JointAction compose(std::size_t hubs, std::size_t storage, std::size_t conversion) {
  JointAction a(std::vector<int>(hubs * kDevicesPerHub, 0));
  for (std::size_t k = 0; k < hubs; ++k) {
    const int sc = static_cast<int>(storage % kStorageChoices);
    const int cc = static_cast<int>(conversion % kConversionChoices);
    storage /= kStorageChoices;
    conversion /= kConversionChoices;
    a.index[k * kDevicesPerHub + 0] = sc / 21;
    a.index[k * kDevicesPerHub + 1] = sc % 21;
    a.index[k * kDevicesPerHub + 2] = cc / 11;
    a.index[k * kDevicesPerHub + 3] = cc % 11;
  }
  return a;
}

struct BestConversion {
  double reward = 0.0;
  std::size_t conversion = 0;
};

// Memo of the best CHP/boiler choice keyed by the storage flows of every hub;
// the slot reward depends on the storage decision only through those flows.
class ConversionMemo {
 public:
  struct Hash {
    std::size_t operator()(const std::vector<double>& v) const {
      std::uint64_t h = 1469598103934665603ULL;
      for (double x : v) h = (h ^ std::bit_cast<std::uint64_t>(x)) * 1099511628211ULL;
      return static_cast<std::size_t>(h);
    }
  };

  const BestConversion& best(const Park& park, const ParkState& state, std::size_t storage, std::size_t t,
                             const std::vector<HubDispatch>& flows) {
    key_.clear();
    for (const auto& d : flows) key_.insert(key_.end(), {d.c_e, d.d_e, d.c_h, d.d_h});
    auto it = memo_.find(key_);
    if (it != memo_.end()) return it->second;
    BestConversion b;
    b.reward = -std::numeric_limits<double>::infinity();
    const std::size_t combos = static_cast<std::size_t>(ipow(kConversionChoices, park.hubs()));
    StepOutcome out;
    for (std::size_t c = 0; c < combos; ++c) {
      park.step(state, compose(park.hubs(), storage, c), t, out, CapacityMode::strict);
      if (out.reward > b.reward) {
        b.reward = out.reward;
        b.conversion = c;
      }
    }
    return memo_.emplace(key_, b).first->second;
  }

  void clear() { memo_.clear(); }

 private:
  std::vector<double> key_;
  std::unordered_map<std::vector<double>, BestConversion, Hash> memo_;
};

inline std::vector<HubDispatch> storage_flows(const Park& park, const ParkState& state, std::size_t storage) {
  const JointAction a = compose(park.hubs(), storage, 0);
  std::vector<HubDispatch> d(park.hubs());
  for (std::size_t k = 0; k < park.hubs(); ++k) {
    d[k] = resolve_dispatch(park.scenario().hub, state[k], a.at(k, DeviceKind::battery), a.at(k, DeviceKind::tank), 0,
                            0, true);
  }
  return d;
}

inline ParkState next_levels(const Park& park, const ParkState& state, const std::vector<HubDispatch>& d) {
  const HubParams& p = park.scenario().hub;
  ParkState n = state;
  for (std::size_t k = 0; k < state.size(); ++k) {
    n[k].b = std::max(0.0, storage_step(state[k].b, d[k].c_e, d[k].d_e, p.eta_ce, p.eta_de));
    n[k].w = std::max(0.0, storage_step(state[k].w, d[k].c_h, d[k].d_h, p.eta_ch, p.eta_dh));
  }
  return n;
}

inline void finish(const Park& park, OracleResult& r) {
  r.objective_cost = static_cast<double>(park.horizon()) * park.scenario().market.b1 - r.value;
  r.replay = marl::rollout(park, marl::scripted(r.schedule), true);
  r.replay.algo = "oracle";
}

inline std::string budget_message(const char* what, double need, double budget) {
  return std::string("oracle: ") + what + " needs about " + fmt_double(need) + " evaluations, budget is " +
         fmt_double(budget) + "; coarsen the step, shorten the horizon or use fewer hubs";
}

}  // namespace detail

// Backward induction over (slot, grid state).
inline OracleResult dp_oracle(const Park& park, const OracleConfig& cfg) {
  const StorageGrid grid(park, cfg.step);
  const std::size_t T = park.horizon(), H = park.hubs();
  const double storage_combos = detail::ipow(detail::kStorageChoices, H);
  const double need = static_cast<double>(T) * grid.states() * storage_combos;
  if (need > cfg.budget) throw OracleBudgetExceeded(detail::budget_message("dynamic programming", need, cfg.budget));
  const auto S = static_cast<std::size_t>(grid.states());
  const auto A = static_cast<std::size_t>(storage_combos);

  std::vector<double> next_value(S, 0.0), value(S);
  std::vector<std::vector<std::uint32_t>> best_storage(T, std::vector<std::uint32_t>(S));
  std::vector<std::vector<std::uint32_t>> best_conversion(T, std::vector<std::uint32_t>(S));
  detail::ConversionMemo memo;
  OracleResult r;
  for (std::size_t t = T; t-- > 0;) {
    memo.clear();
    for (std::size_t s = 0; s < S; ++s) {
      const ParkState st = grid.decode(s);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        const auto flows = detail::storage_flows(park, st, a);
        const auto& conv = memo.best(park, st, a, t, flows);
        const double v = conv.reward + next_value[grid.encode(detail::next_levels(park, st, flows))];
        if (v > best) {
          best = v;
          best_storage[t][s] = static_cast<std::uint32_t>(a);
          best_conversion[t][s] = static_cast<std::uint32_t>(conv.conversion);
        }
      }
      value[s] = best;
    }
    r.work += static_cast<double>(S * A);
    std::swap(value, next_value);
  }
  ParkState st = grid.decode(grid.encode(park.initial_state()));
  r.value = next_value[grid.encode(st)];
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t s = grid.encode(st);
    const std::size_t a = best_storage[t][s];
    r.schedule.push_back(detail::compose(H, a, best_conversion[t][s]));
    st = grid.decode(grid.encode(detail::next_levels(park, st, detail::storage_flows(park, st, a))));
  }
  detail::finish(park, r);
  return r;
}

// Exhaustive search over every storage-action sequence on the same grid
// model, stepping the park slot by slot.
inline OracleResult enumerate_oracle(const Park& park, const OracleConfig& cfg) {
  const StorageGrid grid(park, cfg.step);
  const std::size_t T = park.horizon(), H = park.hubs();
  require(T <= 4 && H <= 2, "enumeration is limited to horizons <= 4 and at most two hubs");
  const double need = detail::ipow(detail::kStorageChoices, T * H);
  if (need > cfg.budget) throw OracleBudgetExceeded(detail::budget_message("enumeration", need, cfg.budget));
  const auto A = static_cast<std::size_t>(detail::ipow(detail::kStorageChoices, H));

  struct Child {
    double reward;
    std::size_t conversion;
    ParkState next;
  };
  // Immediate outcomes of all storage choices at a node, keyed by (t, state).
  std::unordered_map<std::string, std::vector<Child>> nodes;
  const auto children = [&](std::size_t t, const ParkState& st) -> const std::vector<Child>& {
    std::string key = std::to_string(t);
    for (const auto& h : st) key += "|" + fmt_double(h.b) + "," + fmt_double(h.w);
    auto it = nodes.find(key);
    if (it != nodes.end()) return it->second;
    std::vector<Child> ch;
    ch.reserve(A);
    StepOutcome out;
    for (std::size_t a = 0; a < A; ++a) {
      Child c{-std::numeric_limits<double>::infinity(), 0, {}};
      const std::size_t combos = static_cast<std::size_t>(detail::ipow(detail::kConversionChoices, H));
      for (std::size_t cc = 0; cc < combos; ++cc) {
        park.step(st, detail::compose(H, a, cc), t, out, CapacityMode::strict);
        if (out.reward > c.reward) {
          c.reward = out.reward;
          c.conversion = cc;
          c.next = out.next_state;
        }
      }
      for (auto& h : c.next) {
        h.b = static_cast<double>(grid.snap(h.b, grid.levels_b())) * grid.step();
        h.w = static_cast<double>(grid.snap(h.w, grid.levels_w())) * grid.step();
      }
      ch.push_back(std::move(c));
    }
    return nodes.emplace(std::move(key), std::move(ch)).first->second;
  };

  OracleResult r;
  const std::function<double(std::size_t, const ParkState&)> search = [&](std::size_t t, const ParkState& st) {
    if (t == T) {
      r.work += 1.0;
      return 0.0;
    }
    const auto& ch = children(t, st);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : ch) best = std::max(best, c.reward + search(t + 1, c.next));
    return best;
  };
  ParkState st = park.initial_state();
  for (auto& h : st) {
    h.b = static_cast<double>(grid.snap(h.b, grid.levels_b())) * grid.step();
    h.w = static_cast<double>(grid.snap(h.w, grid.levels_w())) * grid.step();
  }
  r.value = search(0, st);
  // Recover one optimal sequence greedily against the recorded values.
  const std::function<double(std::size_t, const ParkState&)> value_of = [&](std::size_t t, const ParkState& s) {
    if (t == T) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : children(t, s)) best = std::max(best, c.reward + value_of(t + 1, c.next));
    return best;
  };
  ParkState cur = st;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& ch = children(t, cur);
    const double target = value_of(t, cur);
    for (std::size_t a = 0; a < ch.size(); ++a) {
      if (ch[a].reward + value_of(t + 1, ch[a].next) == target) {
        r.schedule.push_back(detail::compose(H, a, ch[a].conversion));
        cur = ch[a].next;
        break;
      }
    }
  }
  detail::finish(park, r);
  return r;
}

inline OracleResult run_oracle(const Park& park, const OracleConfig& cfg) {
  return cfg.mode == OracleMode::dp ? dp_oracle(park, cfg) : enumerate_oracle(park, cfg);
}

}  // namespace ehmarl::baselines
