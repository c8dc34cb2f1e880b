#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/text.hpp"
#include "ehmarl/marl/evaluate.hpp"

namespace ehmarl::baselines {

inline double median(std::vector<double> v) {
  require(!v.empty(), "median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Percentage by which `cost` undercuts `reference`. Costs may be negative
// when sales dominate, hence the magnitude in the denominator.
inline double improvement_pct(double reference, double cost) {
  require(reference != 0.0, "improvement over a zero reference cost is undefined");
  return 100.0 * (reference - cost) / std::abs(reference);
}

inline double gap_pct(double cost, double optimum) {
  require(optimum != 0.0, "gap to a zero optimum is undefined");
  return 100.0 * (cost - optimum) / std::abs(optimum);
}

struct RankingRow {
  std::string algo;
  std::size_t seeds = 0;
  double objective_cost = 0.0;  // median over seeds
  double total_cost = 0.0;      // median over seeds
  double violations = 0.0;      // median over seeds
  std::optional<double> oracle_gap;
};

struct Comparison {
  std::string scenario;
  std::vector<RankingRow> rows;  // ascending objective cost
  std::optional<double> oracle_cost;
  // improvement[a][b]: percent by which a's median cost undercuts b's
  std::map<std::string, std::map<std::string, double>> improvement;

  const RankingRow& row(const std::string& algo) const {
    for (const auto& r : rows) {
      if (r.algo == algo) return r;
    }
    throw ContractViolation("no reports for '" + algo + "'");
  }

  std::string table_csv() const {
    std::string s = "rank,algo,seeds,median_objective_cost,median_total_cost,median_violations,oracle_gap_pct\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      s += std::to_string(i + 1) + "," + r.algo + "," + std::to_string(r.seeds) + "," + fmt_double(r.objective_cost) +
           "," + fmt_double(r.total_cost) + "," + fmt_double(r.violations) + "," +
           (r.oracle_gap ? fmt_double(*r.oracle_gap) : std::string("nan")) + "\n";
    }
    return s;
  }

  std::string improvements_csv() const {
    std::string s = "algo,reference,improvement_pct\n";
    for (const auto& [a, m] : improvement) {
      for (const auto& [b, v] : m) s += a + "," + b + "," + fmt_double(v) + "\n";
    }
    return s;
  }

  std::string to_text() const {
    std::string s = "# ehmarl comparison\nscenario = " + scenario + "\n";
    if (oracle_cost) s += "oracle_objective_cost = " + fmt_double(*oracle_cost) + "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      s += "rank." + std::to_string(i + 1) + " = " + r.algo + "\n";
      s += r.algo + ".median_objective_cost = " + fmt_double(r.objective_cost) + "\n";
      s += r.algo + ".median_total_cost = " + fmt_double(r.total_cost) + "\n";
      if (r.oracle_gap) s += r.algo + ".oracle_gap_pct = " + fmt_double(*r.oracle_gap) + "\n";
    }
    for (const auto& [a, m] : improvement) {
      for (const auto& [b, v] : m) s += a + ".improvement_over." + b + " = " + fmt_double(v) + "\n";
    }
    return s;
  }
};

// Ranks algorithms by their median objective cost over seeds. Reports with
// algo "oracle" set the optimum for gap percentages instead of a row.
inline Comparison compare(const std::vector<marl::EvalReport>& reports) {
  if (reports.size() < 2) throw IncomparableReports("need at least two reports to compare");
  Comparison c;
  c.scenario = reports.front().scenario;
  std::map<std::string, std::vector<const marl::EvalReport*>> by_algo;
  for (const auto& r : reports) {
    if (r.scenario != c.scenario) {
      throw IncomparableReports("reports come from different scenarios (" + c.scenario + " vs " + r.scenario + ")");
    }
    if (r.algo == "oracle") {
      if (c.oracle_cost && *c.oracle_cost != r.objective_cost) {
        throw IncomparableReports("conflicting oracle reports");
      }
      c.oracle_cost = r.objective_cost;
    } else {
      by_algo[r.algo].push_back(&r);
    }
  }
  if (by_algo.empty()) throw IncomparableReports("no learner reports among the inputs");
  std::optional<std::multiset<std::uint64_t>> seeds;
  for (const auto& [algo, rs] : by_algo) {
    std::multiset<std::uint64_t> s;
    for (const auto* r : rs) s.insert(r->seed);
    if (seeds && *seeds != s) throw IncomparableReports("algorithm '" + algo + "' was run on a different seed set");
    seeds = s;
  }
  for (const auto& [algo, rs] : by_algo) {
    RankingRow row;
    row.algo = algo;
    row.seeds = rs.size();
    std::vector<double> obj, tot, vio;
    for (const auto* r : rs) {
      obj.push_back(r->objective_cost);
      tot.push_back(r->total_cost);
      vio.push_back(r->violations);
    }
    row.objective_cost = median(obj);
    row.total_cost = median(tot);
    row.violations = median(vio);
    if (c.oracle_cost && *c.oracle_cost != 0.0) row.oracle_gap = gap_pct(row.objective_cost, *c.oracle_cost);
    c.rows.push_back(row);
  }
  std::stable_sort(c.rows.begin(), c.rows.end(),
                   [](const RankingRow& a, const RankingRow& b) { return a.objective_cost < b.objective_cost; });
  for (const auto& a : c.rows) {
    for (const auto& b : c.rows) {
      if (a.algo != b.algo && b.objective_cost != 0.0) {
        c.improvement[a.algo][b.algo] = improvement_pct(b.objective_cost, a.objective_cost);
      }
    }
  }
  return c;
}

}  // namespace ehmarl::baselines
