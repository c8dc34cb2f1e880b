// Acceptance checks, one per criterion. Prints one PASS/FAIL line each and
// exits non-zero if any selected criterion fails.
//
//   acceptance [--criterion N] [--work-dir DIR]

#include <sys/wait.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>

#include "support.hpp"

using namespace ehmarl;
using ehmarl::testing::central_difference;
using ehmarl::testing::rel_error;
using approx::Gradients;
using approx::ParamVector;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

const std::string kDir = EHMARL_SCENARIOS;
const std::string kCli = EHMARL_CLI;
fs::path g_work = fs::temp_directory_path() / "ehmarl_acceptance";

struct Verdict {
  bool pass = false;
  std::string details;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// Training settings for the learning criteria: the committed small config.
marl::TrainConfig small_config(int episodes, std::uint64_t seed) {
  auto cfg = marl::TrainConfig::from_text(KeyValueText::load(kDir + "/small.cfg"));
  cfg.episodes = episodes;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

fs::path work(const std::string& sub) {
  const auto d = g_work / sub;
  fs::create_directories(d);
  return d;
}

// ---- 1: physics --------------------------------------------------------
// Every quantity is recomputed here from the scenario and the action
// indices without going through the library's dispatch code.
Verdict physics() {
  Rng rng(20240601);
  const double tol = 1e-9;
  double worst = 0.0;
  std::string first_failure;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && first_failure.empty()) first_failure = what;
  };
  auto close = [&](double a, double b, const std::string& what) {
    const double d = std::abs(a - b);
    worst = std::max(worst, d);
    check(d <= tol, what + " off by " + fmt(d));
  };
  const int cases = 10000;
  for (int n = 0; n < cases; ++n) {
    Scenario sc;
    sc.hubs = 1 + uniform_index(rng, 3);
    sc.hub.eta_ce = uniform(rng, 0.8, 1.0);
    sc.hub.eta_de = uniform(rng, 0.8, 1.0);
    sc.hub.eta_ch = uniform(rng, 0.8, 1.0);
    sc.hub.eta_dh = uniform(rng, 0.8, 1.0);
    sc.hub.eta_pg = uniform(rng, 0.2, 0.5);
    sc.hub.eta_hg = uniform(rng, 0.2, 0.5);
    sc.hub.eta_bg = uniform(rng, 0.6, 0.95);
    sc.hub.h_chp_max = sc.hub.e_chp_max * sc.hub.eta_hg / sc.hub.eta_pg;
    sc.market.e_max = uniform(rng, 0.0, 6000.0);
    sc.market.g_max = uniform(rng, 0.0, 20000.0);
    sc.market.e_o_max = uniform(rng, 0.0, 3000.0);
    sc.market.b2 = uniform(rng, 0.0, 3.0);
    const double pe = uniform(rng, 0.05, 1.5);
    sc.series.push_back({pe, uniform(rng, 0.05, 1.0), uniform(rng, 0.0, pe), uniform(rng, 0.0, 8000.0),
                         uniform(rng, 0.0, 500.0), uniform(rng, 0.0, 3000.0), uniform(rng, 0.0, 3000.0)});
    sc.zeta = uniform(rng, 1e-5, 1e-3);
    sc.lagrange = uniform01(rng) < 0.5;
    const Park park(sc);
    const auto mode = uniform01(rng) < 0.5 ? CapacityMode::strict : CapacityMode::soft;
    const bool strict = mode == CapacityMode::strict;
    const auto& p = sc.hub;
    const auto& m = sc.market;
    const SlotData x = sc.series.at(0);

    ParkState s(sc.hubs);
    JointAction a;
    for (auto& h : s) {
      h.b = uniform(rng, 0.0, strict ? p.b_max : 1.3 * p.b_max);
      h.w = uniform(rng, 0.0, strict ? p.w_max : 1.3 * p.w_max);
      h.lambda_b = uniform01(rng);
      h.lambda_w = uniform01(rng);
      for (int n_a : {21, 21, 11, 11}) a.index.push_back(static_cast<int>(uniform_index(rng, n_a)));
    }
    const auto o = park.step(s, a, 0, mode);

    double e_net = x.pv, g_dev = 0.0, h_net = 0.0;
    for (std::size_t k = 0; k < sc.hubs; ++k) {
      const auto& d = o.dispatch[k];
      const auto& hs = s[k];
      const auto& nx = o.next_state[k];
      const double fb = (a.at(k, DeviceKind::battery) - 10) / 10.0;
      const double fw = (a.at(k, DeviceKind::tank) - 10) / 10.0;
      const double fc = a.at(k, DeviceKind::chp) / 10.0;
      const double fo = a.at(k, DeviceKind::boiler) / 10.0;
      // Storage flows and recursion.
      auto storage = [&](double f, double lvl, double cap, double cmax, double dmax, double ec, double ed, double c,
                         double dis, double next, const std::string& tag) {
        check(c >= 0.0 && dis >= 0.0 && (c == 0.0 || dis == 0.0), tag + " flow sign");
        check(c <= cmax + tol && dis <= dmax + tol, tag + " flow bound");
        double want_c = f > 0 ? f * cmax : 0.0;
        if (strict) want_c = std::min(want_c, std::max(0.0, (cap - lvl) / ec));
        const double want_d = f < 0 ? std::min(-f * dmax, lvl * ed) : 0.0;
        close(c, want_c, tag + " charge");
        close(dis, want_d, tag + " discharge");
        close(next, std::max(0.0, lvl + ec * c - dis / ed), tag + " recursion");
        check(next >= 0.0, tag + " level negative");
        if (strict && lvl <= cap) check(next <= cap + tol, tag + " level above cap in strict mode");
      };
      storage(fb, hs.b, p.b_max, p.c_e_max, p.d_e_max, p.eta_ce, p.eta_de, d.c_e, d.d_e, nx.b, "battery");
      storage(fw, hs.w, p.w_max, p.c_h_max, p.d_h_max, p.eta_ch, p.eta_dh, d.c_h, d.d_h, nx.w, "tank");
      // Conversion devices.
      close(d.g_chp, fc * p.e_chp_max / p.eta_pg, "chp gas");
      close(d.e_chp, std::min(p.eta_pg * d.g_chp, p.e_chp_max), "chp electricity");
      close(d.h_chp, std::min(p.eta_hg * d.g_chp, p.h_chp_max), "chp heat");
      close(d.g_boiler, fo * p.h_b_max / p.eta_bg, "boiler gas");
      close(d.h_boiler, std::min(p.eta_bg * d.g_boiler, p.h_b_max), "boiler heat");
      check(d.e_chp <= p.e_chp_max + tol && d.h_chp <= p.h_chp_max + tol && d.h_boiler <= p.h_b_max + tol,
            "conversion bound");
      e_net += d.e_chp + d.d_e - d.c_e;
      g_dev += d.g_chp + d.g_boiler;
      h_net += d.h_chp + d.h_boiler + d.d_h - d.c_h;
    }
    // Market limits and balance recomposition.
    check(o.e_buy >= 0.0 && o.e_buy <= m.e_max + tol, "e_buy bound");
    check(o.e_sell >= 0.0 && o.e_sell <= m.e_o_max + tol, "e_sell bound");
    check(o.e_buy == 0.0 || o.e_sell == 0.0, "buy and sell together");
    check(o.g_buy >= 0.0 && o.g_buy <= m.g_max + tol, "g_buy bound");
    close(o.e_buy, std::clamp(x.demand_e - e_net, 0.0, m.e_max), "e_buy");
    close(o.e_sell, std::clamp(e_net - x.demand_e, 0.0, m.e_o_max), "e_sell");
    close(o.g_buy, std::min(g_dev + x.demand_g, m.g_max), "g_buy");
    close(o.e_tot, e_net + o.e_buy - o.e_sell, "electricity recomposition");
    close(o.g_tot, o.g_buy - g_dev, "gas recomposition");
    close(o.h_tot, h_net, "heat recomposition");
    close(o.mismatch_e, std::abs(e_net + o.e_buy - o.e_sell - x.demand_e), "electricity mismatch");
    close(o.mismatch_g, std::abs(o.g_buy - g_dev - x.demand_g), "gas mismatch");
    close(o.mismatch_h, std::abs(h_net - x.demand_h), "heat mismatch");
    const double reward = o.e_sell * x.p_o - o.e_buy * x.p_e - o.g_buy * x.p_g + m.b1 -
                          m.b2 * (o.mismatch_e + o.mismatch_g + o.mismatch_h);
    close(o.reward, reward, "reward");
    close(o.market_cost, o.e_buy * x.p_e + o.g_buy * x.p_g - o.e_sell * x.p_o, "market cost");
    for (std::size_t k = 0; k < sc.hubs; ++k) {
      const auto& nx = o.next_state[k];
      for (std::size_t j = 0; j < kDevicesPerHub; ++j) {
        double expect = reward;
        if (sc.lagrange && j == 0) expect -= s[k].lambda_b * (nx.b - p.b_max);
        if (sc.lagrange && j == 1) expect -= s[k].lambda_w * (nx.w - p.w_max);
        close(o.agent_rewards[k * kDevicesPerHub + j], expect, "agent reward");
      }
      check(nx.lambda_b >= 0.0 && nx.lambda_b <= 1.0 && nx.lambda_w >= 0.0 && nx.lambda_w <= 1.0,
            "multiplier outside [0,1]");
    }
  }
  Verdict v;
  v.pass = first_failure.empty();
  v.details = std::to_string(cases) + " random steps, max deviation " + fmt(worst) +
              (v.pass ? "" : ", first failure: " + first_failure);
  return v;
}

// ---- 2: gradients ------------------------------------------------------
Verdict gradients() {
  Rng rng(77);
  const std::vector<int> counts{21, 11};
  marl::TrainConfig cfg = ehmarl::testing::micro_config();
  cfg.embed_dim = 8;
  cfg.heads = 2;
  auto ce = marl::CriticEnsemble::create(marl::CriticKind::attention, counts, kObsDim, cfg, rng);
  const auto mb = ehmarl::testing::random_minibatch(counts, 4, rng);
  std::vector<VectorXd> y;
  for (std::size_t j = 0; j < 2; ++j) {
    VectorXd v(4);
    for (Eigen::Index b = 0; b < 4; ++b) v[b] = uniform(rng, -1.0, 1.0);
    y.push_back(v);
  }
  const auto cl = marl::critic_loss_given_targets(*ce.net, ce.live, mb, y);
  auto fc = [&](const ParamVector& p) { return marl::critic_loss_given_targets(*ce.net, p, mb, y).loss; };

  approx::ParamLayout lay;
  approx::CategoricalPolicy pol(lay, "actor", kObsDim, {16, 16}, 21, 0.01);
  const ParamVector pa = lay.initialize(rng);
  MatrixXd obs(kObsDim, 6);
  for (Eigen::Index i = 0; i < obs.size(); ++i) obs.data()[i] = uniform(rng, -1.0, 1.0);
  std::vector<int> acts;
  VectorXd w(6);
  for (int b = 0; b < 6; ++b) {
    acts.push_back(static_cast<int>(uniform_index(rng, 21)));
    w[b] = uniform(rng, -1.0, 1.0);
  }
  const auto su = marl::actor_surrogate(pol, pa, obs, acts, w);
  auto fa = [&](const ParamVector& p) { return marl::actor_surrogate(pol, p, obs, acts, w).value; };

  const std::size_t want = 500;
  auto sweep = [&](const ParamVector& p, const Gradients& g, const std::function<double(const ParamVector&)>& f,
                   std::size_t& used) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(idx.size(), want));
    used = idx.size();
    double worst = 0.0;
    // Two steps per coordinate. At 1e-6 round-off in the O(1) loss swamps
    // derivatives near 1e-7; at 1e-5 the difference can straddle a leaky-ReLU
    // kink. A wrong analytic gradient disagrees with both.
    for (auto i : idx) {
      const double e = std::min(rel_error(g[i], central_difference(f, p, i, 1e-5)),
                                rel_error(g[i], central_difference(f, p, i, 1e-6)));
      worst = std::max(worst, e);
    }
    return worst;
  };
  std::size_t nc = 0, na = 0;
  const double wc = sweep(ce.live, cl.grad, fc, nc);
  const double wa = sweep(pa, su.grad, fa, na);
  Verdict v;
  v.pass = nc >= want && na >= want && wc < 1e-4 && wa < 1e-4;
  v.details = "critic loss: " + std::to_string(nc) + " of " + std::to_string(ce.live.size()) +
              " params, max rel err " + fmt(wc) + "; actor surrogate: " + std::to_string(na) + " of " +
              std::to_string(pa.size()) + " params, max rel err " + fmt(wa);
  return v;
}

// ---- 3: counterfactual baseline ----------------------------------------
Verdict baseline() {
  Rng rng(303);
  const std::vector<int> counts{21, 21, 11, 11};
  const auto cfg = ehmarl::testing::micro_config();
  auto ce = marl::CriticEnsemble::create(marl::CriticKind::attention, counts, kObsDim, cfg, rng);
  auto actors = marl::ActorSet::create(counts, kObsDim, {6}, 0.01, rng);
  double worst_b = 0.0, worst_a = 0.0;
  int fixtures = 0;
  while (fixtures < 1000) {
    // Fresh weights every few fixtures so Q and pi vary in scale.
    if (fixtures % 50 == 0) {
      ce.live = ce.net->layout().initialize(rng) * uniform(rng, 0.5, 4.0);
      for (std::size_t j = 0; j < counts.size(); ++j) {
        actors.live[j] = actors.nets[j]->layout.initialize(rng) * uniform(rng, 0.5, 6.0);
      }
    }
    const auto mb = ehmarl::testing::random_minibatch(counts, 5, rng);
    const auto q = ce.net->forward(ce.live, mb.obs, mb.actions);
    for (std::size_t j = 0; j < counts.size() && fixtures < 1000; ++j) {
      const auto pb = marl::evaluate_policy(actors.policy(j), actors.live[j], mb.obs[j]);
      for (Eigen::Index b = 0; b < 5 && fixtures < 1000; ++b, ++fixtures) {
        const VectorXd pi = pb.probs.col(b);
        const VectorXd qj = q[j].col(b);
        double brute = 0.0;
        for (Eigen::Index k = 0; k < pi.size(); ++k) brute += pi[k] * qj[k];
        worst_b = std::max(worst_b, std::abs(marl::counterfactual_baseline(pi, qj) - brute));
        const VectorXd adv = marl::advantages(pi, qj);
        double expected = 0.0;
        for (Eigen::Index k = 0; k < pi.size(); ++k) expected += pi[k] * adv[k];
        worst_a = std::max(worst_a, std::abs(expected));
      }
    }
  }
  Verdict v;
  v.pass = worst_b <= 1e-12 && worst_a <= 1e-9;
  v.details = std::to_string(fixtures) + " fixtures, max |baseline - brute force| " + fmt(worst_b) +
              ", max |E_pi[A]| " + fmt(worst_a);
  return v;
}

// ---- 4: attention ------------------------------------------------------
Verdict attention() {
  Rng rng(404);
  double sum_err = 0.0, perm_err = 0.0, min_w = 1.0;
  int fixtures = 0;
  bool uniform_exact = true;
  for (int rep = 0; rep < 20; ++rep) {
    for (std::size_t N = 3; N <= 8; ++N) {
      approx::ParamLayout lay;
      const int H = 1 + static_cast<int>(uniform_index(rng, 4));
      const int E = H * (1 + static_cast<int>(uniform_index(rng, 3)));
      approx::MultiHeadAttention attn(lay, "a", E, H, 2 + static_cast<int>(uniform_index(rng, 3)), 0.01);
      approx::MultiHeadAttention uni(lay, "u", E, H, 2, 0.01, true);
      const ParamVector p = lay.initialize(rng) * uniform(rng, 1.0, 5.0);
      const Eigen::Index B = 3;
      std::vector<MatrixXd> e, s;
      for (std::size_t l = 0; l < N; ++l) {
        MatrixXd a(E, B), b(E, B);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
          a.data()[i] = uniform(rng, -2.0, 2.0);
          b.data()[i] = uniform(rng, -2.0, 2.0);
        }
        e.push_back(a);
        s.push_back(b);
      }
      approx::MultiHeadAttention::Cache c, pc, uc;
      const auto z = attn.forward(p, e, s, &c);
      std::vector<std::size_t> perm(N);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<MatrixXd> pe(N), ps(N);
      for (std::size_t i = 0; i < N; ++i) {
        pe[i] = e[perm[i]];
        ps[i] = s[perm[i]];
      }
      const auto pz = attn.forward(p, pe, ps, &pc);
      uni.forward(p, e, s, &uc);
      for (int m = 0; m < H; ++m) {
        for (std::size_t j = 0; j < N; ++j) {
          const MatrixXd& w = c.weights[m][j];
          for (Eigen::Index b = 0; b < B; ++b) {
            double tot = 0.0;
            for (std::size_t l = 0; l < N; ++l) {
              if (l == j) continue;
              min_w = std::min(min_w, w(static_cast<Eigen::Index>(l), b));
              tot += w(static_cast<Eigen::Index>(l), b);
              const double u = uc.weights[m][j](static_cast<Eigen::Index>(l), b);
              if (u != 1.0 / static_cast<double>(N - 1)) uniform_exact = false;
            }
            sum_err = std::max(sum_err, std::abs(tot - 1.0));
          }
        }
        // Agent i of the permuted fixture is agent perm[i] of the original.
        for (std::size_t i = 0; i < N; ++i) {
          for (std::size_t l = 0; l < N; ++l) {
            for (Eigen::Index b = 0; b < B; ++b) {
              perm_err = std::max(perm_err, std::abs(pc.weights[m][i](static_cast<Eigen::Index>(l), b) -
                                                     c.weights[m][perm[i]](static_cast<Eigen::Index>(perm[l]), b)));
            }
          }
          perm_err = std::max(perm_err, (pz[i] - z[perm[i]]).cwiseAbs().maxCoeff());
        }
      }
      ++fixtures;
    }
  }
  // The uniform baseline's own training log: attention extremes over every
  // update must both equal 1/(N-1).
  const Park park(ehmarl::testing::flat_scenario(4, 2));
  auto cfg = ehmarl::testing::micro_config();
  cfg.episodes = 4;
  cfg.warmup = 8;
  cfg.seed = 9;
  const auto res = marl::train(park, cfg, marl::CriticKind::uniform_attention);
  const double expect = 1.0 / static_cast<double>(park.agents() - 1);
  bool logged = false;
  for (const auto& m : res.metrics) {
    if (std::isnan(m.attn_min)) continue;
    logged = true;
    if (m.attn_min != expect || m.attn_max != expect) uniform_exact = false;
  }
  Verdict v;
  v.pass = min_w >= 0.0 && sum_err <= 1e-9 && perm_err <= 1e-9 && uniform_exact && logged;
  v.details = std::to_string(fixtures) + " fixtures with 3-8 agents, min weight " + fmt(min_w) +
              ", max |sum-1| " + fmt(sum_err) + ", max permutation error " + fmt(perm_err) +
              ", uniform weights exactly 1/(N-1): " + (uniform_exact && logged ? "yes" : "no");
  return v;
}

// ---- 5: constraint learning -------------------------------------------
Verdict constraint() {
  const int episodes = 2500;  // ten runs inside the 15 minute budget
  const auto base = data::load_scenario(kDir + "/overcharge.scn");
  int passed = 0;
  std::string rows;
  const auto dir = work("c5");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double lam = 0.0;
    int viol[2] = {0, 0};
    for (int lagrange : {1, 0}) {
      Scenario sc = base;
      sc.lagrange = lagrange == 1;
      const Park park(sc);
      const auto res = marl::train(park, small_config(episodes, seed), marl::CriticKind::attention);
      if (lagrange) {
        const std::size_t from = res.metrics.size() * 9 / 10;
        for (std::size_t e = from; e < res.metrics.size(); ++e) lam += res.metrics[e].lambda_b;
        lam /= static_cast<double>(res.metrics.size() - from);
      }
      const auto ev = marl::evaluate(res.checkpoint, park, marl::PolicyMode::greedy, true);
      viol[lagrange ? 0 : 1] = ev.violations;
      write_file((dir / ("seed" + std::to_string(seed) + (lagrange ? "_lagrange" : "_plain") + ".txt")).string(),
                 ev.to_text());
    }
    const bool ok = lam < 0.05 && viol[0] == 0 && viol[1] > viol[0];
    passed += ok;
    rows += " [seed " + std::to_string(seed) + ": lambda_b " + fmt(lam, 3) + ", violations " +
            std::to_string(viol[0]) + " vs " + std::to_string(viol[1]) + (ok ? " ok]" : " miss]");
  }
  Verdict v;
  v.pass = passed >= 3;
  v.details = std::to_string(passed) + "/5 seeds pass (lagrange vs disabled)" + rows;
  return v;
}

// ---- 6: oracle equivalence --------------------------------------------
Verdict oracle_equivalence() {
  const Park park(data::load_scenario(kDir + "/micro3.scn"));
  baselines::OracleConfig cfg;
  cfg.step = 500.0;
  const auto dp = baselines::dp_oracle(park, cfg);
  cfg.mode = baselines::OracleMode::enumerate;
  const auto en = baselines::enumerate_oracle(park, cfg);
  Verdict v;
  v.pass = dp.value == en.value && dp.objective_cost == en.objective_cost;
  v.details = "T=3, 1 hub, step 500: dp " + fmt_double(dp.value) + ", enumeration " + fmt_double(en.value) +
              " over " + fmt(en.work) + " sequences";
  return v;
}

// ---- 7: optimality gap -------------------------------------------------
Verdict optimality_gap() {
  const Park park(data::load_scenario(kDir + "/day8.scn"));
  baselines::OracleConfig ocfg;
  ocfg.step = 100.0;
  const auto orc = baselines::dp_oracle(park, ocfg);
  // The replayed schedule is a feasible plan; the smaller of it and the grid
  // value is the tighter reference.
  const double best = std::min(orc.objective_cost, orc.replay.objective_cost);
  const int episodes = 50000 / static_cast<int>(park.horizon());
  std::vector<double> gaps;
  std::string rows;
  const auto dir = work("c7");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto res = marl::train(park, small_config(episodes, seed), marl::CriticKind::attention);
    const auto ev = marl::evaluate(res.checkpoint, park, marl::PolicyMode::greedy, true);
    write_file((dir / ("seed" + std::to_string(seed) + ".txt")).string(), ev.to_text());
    gaps.push_back(baselines::gap_pct(ev.objective_cost, best));
    rows += " " + fmt(ev.objective_cost, 6);
  }
  const double med = baselines::median(gaps);
  Verdict v;
  v.pass = med <= 15.0;
  v.details = "oracle cost " + fmt(best, 6) + ", learner costs" + rows + " after " +
              std::to_string(episodes * static_cast<int>(park.horizon())) + " steps, median gap " + fmt(med, 3) + "%";
  return v;
}

// ---- 8: ablation ordering ---------------------------------------------
Verdict ablation() {
  const Park park(data::load_scenario(kDir + "/bench24.scn"));
  const int episodes = 2000;
  const std::vector<marl::CriticKind> kinds{marl::CriticKind::attention, marl::CriticKind::uniform_attention,
                                            marl::CriticKind::concat, marl::CriticKind::independent};
  std::vector<marl::EvalReport> reports;
  const auto dir = work("c8");
  for (auto kind : kinds) {
    for (std::uint64_t seed = 1; seed <= 7; ++seed) {
      const auto res = marl::train(park, small_config(episodes, seed), kind);
      reports.push_back(marl::evaluate(res.checkpoint, park, marl::PolicyMode::greedy, true));
      write_file((dir / (std::string(marl::critic_kind_name(kind)) + "_seed" + std::to_string(seed) + ".txt")).string(),
                 reports.back().to_text());
    }
  }
  const auto cmp = baselines::compare(reports);
  write_file((dir / "ranking.csv").string(), cmp.table_csv());
  const double p = cmp.row("proposed").objective_cost, u = cmp.row("uniform").objective_cost;
  const double c = cmp.row("concat").objective_cost, i = cmp.row("independent").objective_cost;
  std::string order;
  for (const auto& r : cmp.rows) order += (order.empty() ? "" : " < ") + r.algo + " " + fmt(r.objective_cost, 6);
  Verdict v;
  v.pass = p <= u && u <= c && p <= i;
  v.details = "median cost over 7 seeds: " + order + "; proposed<=uniform " + (p <= u ? "yes" : "no") +
              ", uniform<=concat " + (u <= c ? "yes" : "no") + ", proposed<=independent " + (p <= i ? "yes" : "no");
  return v;
}

// ---- 9: scalability ----------------------------------------------------
Verdict scalability() {
  const int episodes = 1500;
  const int seeds = 3;
  std::vector<double> imp;
  std::string rows;
  const auto dir = work("c9");
  for (const char* name : {"scale2", "scale4"}) {
    const Park park(data::load_scenario(kDir + "/" + name + ".scn"));
    std::vector<marl::EvalReport> reports;
    for (auto kind : {marl::CriticKind::attention, marl::CriticKind::independent}) {
      for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(seeds); ++seed) {
        const auto res = marl::train(park, small_config(episodes, seed), kind);
        reports.push_back(marl::evaluate(res.checkpoint, park, marl::PolicyMode::greedy, true));
        write_file((dir / (std::string(name) + "_" + marl::critic_kind_name(kind) + "_seed" + std::to_string(seed) +
                           ".txt")).string(),
                   reports.back().to_text());
      }
    }
    const auto cmp = baselines::compare(reports);
    imp.push_back(cmp.improvement.at("proposed").at("independent"));
    rows += std::string(rows.empty() ? "" : ", ") + std::to_string(park.agents()) + " agents " +
            fmt(cmp.row("proposed").objective_cost, 6) + " vs " + fmt(cmp.row("independent").objective_cost, 6) +
            " (" + fmt(imp.back(), 3) + "%)";
  }
  Verdict v;
  v.pass = imp[1] >= imp[0];
  v.details = "median cost proposed vs independent: " + rows +
              "; reference direction: improvement grows with the agent count; observed " +
              (v.pass ? "non-decreasing" : "shrinking");
  return v;
}

// ---- 10: reproducibility ----------------------------------------------
int run_cli(const std::string& args) {
  const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict reproducibility() {
  const auto d = work("c10");
  std::vector<std::string> diffs;
  int failures = 0;
  auto same = [&](const fs::path& a, const fs::path& b) {
    if (!fs::exists(a) || !fs::exists(b) || read_file(a.string()) != read_file(b.string())) {
      diffs.push_back(a.filename().string());
    }
  };
  for (const char* run : {"a", "b"}) {
    fs::remove_all(d / run);
    failures += run_cli("train --scenario " + kDir + "/micro3.scn --config " + kDir +
                        "/small.cfg --episodes 40 --seed 17 --out " + (d / run).string()) != 0;
    failures += run_cli("eval --checkpoint " + (d / run / "checkpoint.txt").string() + " --scenario " + kDir +
                        "/micro3.scn --mode sampled --seed 5 --out " + (d / run / "eval.txt").string()) != 0;
    failures += run_cli("gen-data --spec " + kDir + "/day.profile --seed 3 --out " + (d / run / "series.csv").string()) != 0;
    failures += run_cli("oracle --scenario " + kDir + "/micro3.scn --step 500 --out " +
                        (d / run / "oracle.txt").string()) != 0;
  }
  for (const char* f : {"metrics.csv", "checkpoint.txt", "report.txt", "dispatch.csv", "config.txt", "eval.txt",
                        "series.csv", "oracle.txt"}) {
    same(d / "a" / f, d / "b" / f);
  }
  Verdict v;
  v.pass = failures == 0 && diffs.empty();
  v.details = "train/eval/gen-data/oracle run twice with fixed seeds: " + std::to_string(failures) +
              " failed invocations, " + std::to_string(diffs.size()) + " differing files";
  for (const auto& f : diffs) v.details += " " + f;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance checks");
  int only = 0;
  std::string dir;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--work-dir", dir, "directory for reports written along the way");
  CLI11_PARSE(app, argc, argv);
  if (!dir.empty()) g_work = dir;

  const std::vector<std::function<Verdict()>> checks{physics, gradients, baseline, attention, constraint,
                                                      oracle_equivalence, optimality_gap, ablation, scalability,
                                                      reproducibility};
  int failed = 0;
  for (int n = 1; n <= 10; ++n) {
    if (only && n != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = checks[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      v.details = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "CRITERION " << n << (v.pass ? " PASS: " : " FAIL: ") << v.details << " (" << fmt(secs, 3) << " s)"
              << std::endl;
    failed += !v.pass;
  }
  return failed ? 1 : 0;
}
