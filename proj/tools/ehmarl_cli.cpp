// ehmarl command-line entry point.
//
// Exit status: 0 success, 1 usage error, 2 runtime failure.
// EHMARL_LOG=quiet|info|debug controls progress output on stderr.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ehmarl/ehmarl.hpp"

namespace fs = std::filesystem;
using namespace ehmarl;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* v = std::getenv("EHMARL_LOG");
  if (!v) return LogLevel::info;
  const std::string s(v);
  if (s == "quiet" || s == "0") return LogLevel::quiet;
  if (s == "debug" || s == "2") return LogLevel::debug;
  return LogLevel::info;
}

void log(LogLevel at, const std::string& msg) {
  if (static_cast<int>(log_level()) >= static_cast<int>(at)) std::cerr << msg << "\n";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create directory '" + dir + "': " + ec.message());
}

void print_report(const marl::EvalReport& r) {
  std::cout << "algo             " << r.algo << "\n"
            << "mode             " << r.mode << (r.strict ? " strict" : " soft") << "\n"
            << "objective_cost   " << fmt_double(r.objective_cost) << "\n"
            << "total_cost       " << fmt_double(r.total_cost) << "\n"
            << "  electricity    " << fmt_double(r.electricity_cost) << "\n"
            << "  gas            " << fmt_double(r.gas_cost) << "\n"
            << "  sales          " << fmt_double(r.sale_revenue) << "\n"
            << "mismatch_penalty " << fmt_double(r.mismatch_penalty) << "\n"
            << "total_reward     " << fmt_double(r.total_reward) << "\n"
            << "violations       " << r.violations << "\n";
}

// ---- gen-data ----------------------------------------------------------
struct GenData {
  std::string spec, out;
  std::optional<std::uint64_t> seed;
  int run() const {
    auto ps = data::load_profile(spec);
    if (seed) ps.seed = *seed;
    data::write_series(out, data::generate_series(ps));
    log(LogLevel::info, "wrote " + std::to_string(ps.horizon) + " slots to " + out);
    return 0;
  }
};

// ---- train --------------------------------------------------------------
struct Train {
  std::string scenario, config, algo = "proposed", out;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  int run() const {
    const Park park(data::load_scenario(scenario));
    marl::TrainConfig cfg;
    if (!config.empty()) cfg = marl::TrainConfig::from_text(KeyValueText::load(config));
    if (seed) cfg.seed = *seed;
    if (episodes) cfg.episodes = *episodes;
    cfg.validate();
    const auto kind = marl::critic_kind_from_name(algo);
    ensure_dir(out);
    std::string metrics = marl::metrics_header(park.agents()) + "\n";
    const int every = std::max(1, cfg.episodes / 20);
    auto res = marl::train(park, cfg, kind, [&](const marl::EpisodeMetrics& m) {
      metrics += marl::metrics_row(m) + "\n";
      if (m.episode % every == 0 || m.episode + 1 == cfg.episodes) {
        log(LogLevel::info, "episode " + std::to_string(m.episode) + " mean_reward " + fmt_double(m.mean_reward) +
                                " total_cost " + fmt_double(m.total_cost) + " lambda_b " + fmt_double(m.lambda_b));
      }
      log(LogLevel::debug, marl::metrics_row(m));
    });
    write_file((fs::path(out) / "metrics.csv").string(), metrics);
    res.checkpoint.save((fs::path(out) / "checkpoint.txt").string());
    write_file((fs::path(out) / "config.txt").string(),
               "# training configuration\nalgo = " + std::string(marl::critic_kind_name(kind)) +
                   "\nscenario = " + park.scenario().fingerprint() + "\n" + cfg.to_text());
    auto report = marl::evaluate(res.checkpoint, park, marl::PolicyMode::greedy, true);
    write_file((fs::path(out) / "report.txt").string(), report.to_text());
    write_file((fs::path(out) / "dispatch.csv").string(), marl::dispatch_csv(report, park.scenario()));
    print_report(report);
    return 0;
  }
};

// ---- eval ---------------------------------------------------------------
struct Eval {
  std::string checkpoint, scenario, mode = "greedy", out, dispatch;
  bool strict = false;
  std::uint64_t seed = 0;
  int run() const {
    const Park park(data::load_scenario(scenario));
    const auto ck = approx::Checkpoint::load(checkpoint);
    const auto r = marl::evaluate(ck, park, marl::policy_mode_from_name(mode), strict, seed);
    if (!out.empty()) write_file(out, r.to_text());
    if (!dispatch.empty()) write_file(dispatch, marl::dispatch_csv(r, park.scenario()));
    print_report(r);
    return 0;
  }
};

// ---- oracle -------------------------------------------------------------
struct Oracle {
  std::string scenario, mode = "dp", out, dispatch;
  double step = 100.0;
  double budget = 2e9;
  int run() const {
    const Park park(data::load_scenario(scenario));
    baselines::OracleConfig oc;
    oc.step = step;
    oc.budget = budget;
    oc.mode = mode == "dp" ? baselines::OracleMode::dp : baselines::OracleMode::enumerate;
    const auto r = baselines::run_oracle(park, oc);
    if (!out.empty()) write_file(out, r.replay.to_text());
    if (!dispatch.empty()) write_file(dispatch, marl::dispatch_csv(r.replay, park.scenario()));
    std::cout << "optimal_objective_cost " << fmt_double(r.objective_cost) << "\n"
              << "optimal_total_reward   " << fmt_double(r.value) << "\n"
              << "replay_objective_cost  " << fmt_double(r.replay.objective_cost) << "\n"
              << "replay_total_cost      " << fmt_double(r.replay.total_cost) << "\n"
              << "replay_violations      " << r.replay.violations << "\n";
    return 0;
  }
};

// ---- compare ------------------------------------------------------------
struct Compare {
  std::vector<std::string> reports;
  std::string out, improvements, text;
  int run() const {
    std::vector<marl::EvalReport> rs;
    for (const auto& p : reports) rs.push_back(marl::EvalReport::load(p));
    const auto c = baselines::compare(rs);
    if (!out.empty()) write_file(out, c.table_csv());
    if (!improvements.empty()) write_file(improvements, c.improvements_csv());
    if (!text.empty()) write_file(text, c.to_text());
    std::cout << c.table_csv() << "\n" << c.improvements_csv();
    return 0;
  }
};

// ---- export-plots -------------------------------------------------------
// Column selections of the metrics and dispatch files, one file per figure.
struct ExportPlots {
  std::string metrics, dispatch, out_dir;

  struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    static Table read(const std::string& path) {
      Table t;
      bool first = true;
      for (const auto& line : split(read_file(path), '\n')) {
        if (line.empty()) continue;
        if (first) {
          t.header = split(line, ',');
          first = false;
        } else {
          t.rows.push_back(split(line, ','));
          if (t.rows.back().size() != t.header.size()) throw LoadError(path + ": ragged row");
        }
      }
      if (t.header.empty()) throw LoadError(path + ": empty file");
      return t;
    }

    std::size_t col(const std::string& name) const {
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
      }
      throw LoadError("column '" + name + "' not found");
    }

    std::string select(const std::vector<std::string>& names, const std::string& only_col = "",
                       const std::string& only_value = "") const {
      std::vector<std::size_t> idx;
      for (const auto& n : names) idx.push_back(col(n));
      std::string s;
      for (std::size_t i = 0; i < names.size(); ++i) s += (i ? "," : "") + names[i];
      s += "\n";
      const std::size_t filter = only_col.empty() ? 0 : col(only_col);
      for (const auto& r : rows) {
        if (!only_col.empty() && r[filter] != only_value) continue;
        for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + r[idx[i]];
        s += "\n";
      }
      return s;
    }
  };

  int run() const {
    if (metrics.empty() && dispatch.empty()) throw CLI::ValidationError("export-plots", "give --metrics and/or --dispatch");
    ensure_dir(out_dir);
    const fs::path d(out_dir);
    if (!metrics.empty()) {
      const auto m = Table::read(metrics);
      write_file((d / "reward_curve.csv").string(), m.select({"episode", "mean_reward"}));
      write_file((d / "cost_curve.csv").string(), m.select({"episode", "total_cost"}));
      write_file((d / "constraint_trace.csv").string(), m.select({"episode", "lambda_b", "lambda_w", "violations"}));
      write_file((d / "attention_range.csv").string(), m.select({"episode", "attn_min", "attn_max"}));
      std::vector<std::string> loss{"episode", "critic_loss"};
      for (const auto& h : m.header) {
        if (h.rfind("actor_loss_", 0) == 0 || h.rfind("entropy_", 0) == 0) loss.push_back(h);
      }
      write_file((d / "losses.csv").string(), m.select(loss));
    }
    if (!dispatch.empty()) {
      const auto t = Table::read(dispatch);
      write_file((d / "slot_costs.csv").string(),
                 t.select({"t", "p_e", "p_o", "e_buy", "e_sell", "g_buy", "reward", "market_cost"}, "hub", "0"));
      write_file((d / "dispatch_profile.csv").string(),
                 t.select({"t", "hub", "a_batt", "a_tank", "a_chp", "a_boiler", "b", "w"}));
      write_file((d / "electricity_balance.csv").string(),
                 t.select({"t", "hub", "pv", "e_chp", "c_e", "d_e", "e_buy", "e_sell", "demand_e", "mismatch_e"}));
      write_file((d / "heat_balance.csv").string(),
                 t.select({"t", "hub", "h_chp", "h_boiler", "c_h", "d_h", "demand_h", "mismatch_h"}));
    }
    log(LogLevel::info, "plot data written to " + out_dir);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-energy park simulator, multi-agent learner and dispatch oracle", "ehmarl"};
  app.require_subcommand(1);

  GenData gen;
  auto* g = app.add_subcommand("gen-data", "generate a synthetic exogenous series");
  g->add_option("--spec", gen.spec, "profile spec file")->required()->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "output series CSV")->required();
  g->add_option("--seed", gen.seed, "override the spec seed");

  Train tr;
  auto* t = app.add_subcommand("train", "train a learner and write metrics, checkpoint and report");
  t->add_option("--scenario", tr.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  t->add_option("--config", tr.config, "training configuration file")->check(CLI::ExistingFile);
  t->add_option("--algo", tr.algo, "critic structure")
      ->check(CLI::IsMember({"proposed", "independent", "concat", "uniform"}));
  t->add_option("--seed", tr.seed, "random seed (overrides the config)");
  t->add_option("--episodes", tr.episodes, "episode count (overrides the config)")->check(CLI::PositiveNumber);
  t->add_option("--out", tr.out, "output directory")->required();

  Eval ev;
  auto* e = app.add_subcommand("eval", "roll out a checkpoint and report its cost");
  e->add_option("--checkpoint", ev.checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  e->add_option("--scenario", ev.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  e->add_flag("--strict", ev.strict, "clamp charging to headroom and count attempted violations");
  e->add_option("--mode", ev.mode, "greedy or sampled")->check(CLI::IsMember({"greedy", "sampled"}));
  e->add_option("--seed", ev.seed, "seed for sampled mode");
  e->add_option("--out", ev.out, "write the report here");
  e->add_option("--dispatch", ev.dispatch, "write the per-slot dispatch table here");

  Oracle orc;
  auto* o = app.add_subcommand("oracle", "optimal dispatch by dynamic programming or enumeration");
  o->add_option("--scenario", orc.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  o->add_option("--step", orc.step, "storage discretization, kWh")->check(CLI::PositiveNumber);
  o->add_option("--mode", orc.mode, "dp or enumerate")->check(CLI::IsMember({"dp", "enumerate"}));
  o->add_option("--budget", orc.budget, "maximum evaluations before refusing")->check(CLI::PositiveNumber);
  o->add_option("--out", orc.out, "write the replayed schedule's report here");
  o->add_option("--dispatch", orc.dispatch, "write the optimal dispatch table here");

  Compare cmp;
  auto* c = app.add_subcommand("compare", "rank evaluation reports by median cost");
  c->add_option("--reports", cmp.reports, "report files")->required()->expected(2, -1)->check(CLI::ExistingFile);
  c->add_option("--out", cmp.out, "ranking table CSV");
  c->add_option("--improvements", cmp.improvements, "pairwise improvement CSV");
  c->add_option("--text", cmp.text, "structured text report");

  ExportPlots xp;
  auto* x = app.add_subcommand("export-plots", "extract plot-ready tables from metrics and dispatch files");
  x->add_option("--metrics", xp.metrics, "metrics CSV from train")->check(CLI::ExistingFile);
  x->add_option("--dispatch", xp.dispatch, "dispatch CSV from train, eval or oracle")->check(CLI::ExistingFile);
  x->add_option("--out-dir", xp.out_dir, "output directory")->required();

  if (argc <= 1) {
    std::cerr << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 1;
  }

  try {
    if (*g) return gen.run();
    if (*t) return tr.run();
    if (*e) return ev.run();
    if (*o) return orc.run();
    if (*c) return cmp.run();
    if (*x) return xp.run();
  } catch (const CLI::ValidationError& err) {
    std::cerr << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 1;
}
