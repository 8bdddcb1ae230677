#pragma once

// Hand-built cascade scenarios of at most six firms, and a brute-force
// fixed-point oracle that shares no code with run_cascade beyond the data
// types.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "chainbk/cascade.hpp"

namespace test {

struct FirmSpec {
  std::string id;
  double revenue;
  double labor;
  double equity;
  double prev_revenue = 0.0;  ///< 0 = same as revenue
};

struct EdgeSpec {
  std::string supplier;
  std::string customer;
  double k;
};

struct CascadeFixture {
  std::string name;
  chainbk::Economy economy;
  chainbk::CascadeConfig config;
};

/// Every firm has alpha = beta = 0.3, K = 100, A and r as given.
inline chainbk::Economy build(const std::vector<FirmSpec>& firms,
                              const std::vector<EdgeSpec>& edges, double a = 0.1,
                              double r = 0.05) {
  chainbk::Economy e;
  for (const auto& f : firms) {
    e.network.add_firm(f.id);
    e.params.push_back({0.3, 0.3, a, r, 0.02});
    e.states.push_back({f.revenue, f.prev_revenue > 0.0 ? f.prev_revenue : f.revenue, 100.0,
                        f.labor, f.equity, false});
  }
  for (const auto& x : edges) e.network.add_edge(x.supplier, x.customer, x.k);
  return e;
}

inline CascadeFixture fixture(std::string name, chainbk::Economy e,
                              std::vector<std::string> triggers, double gdp_ratio = 1.0,
                              chainbk::BankruptRatioPolicy policy =
                                  chainbk::BankruptRatioPolicy::zero_revenue) {
  CascadeFixture f{std::move(name), std::move(e), {}};
  f.config.trigger_firms = std::move(triggers);
  f.config.gdp_ratio = gdp_ratio;
  f.config.policy = policy;
  return f;
}

/// A supplies B supplies C. Pure revenue-minus-wage firms (A = r = 0) so the
/// numbers can be traced by hand; see test_cascade.cpp.
inline chainbk::Economy abc_chain(double equity_a, double k_ab) {
  return build({{"A", 200.0, 150.0, equity_a}, {"B", 100.0, 60.0, 5.0}, {"C", 80.0, 10.0, 5.0}},
               {{"A", "B", k_ab}, {"B", "C", 0.5}}, 0.0, 0.0);
}

inline std::vector<CascadeFixture> cascade_fixtures() {
  using chainbk::BankruptRatioPolicy;
  std::vector<CascadeFixture> out;
  out.push_back(fixture("chain A-B-C, propagates to A", abc_chain(5.0, 0.3), {"C"}));
  out.push_back(fixture("chain A-B-C, A stopped by equity", abc_chain(20.0, 0.3), {"C"}));
  out.push_back(fixture("chain A-B-C, A stopped by weak link", abc_chain(5.0, 0.01), {"C"}));
  out.push_back(fixture("chain A-B-C, pure loss", abc_chain(5.0, 0.3), {"C"}, 1.0,
                        BankruptRatioPolicy::pure_loss));
  out.push_back(fixture("chain A-B-C, trigger in the middle", abc_chain(5.0, 0.3), {"B"}));
  out.push_back(fixture("trigger without suppliers", abc_chain(5.0, 0.3), {"A"}));

  out.push_back(fixture("star around a hub customer",
                        build({{"H", 500, 50, 10},
                               {"S1", 100, 60, 1},
                               {"S2", 100, 60, 200},
                               {"S3", 100, 20, 1},
                               {"S4", 120, 70, 3}},
                              {{"S1", "H", 0.4}, {"S2", "H", 0.4}, {"S3", "H", 0.4},
                               {"S4", "H", 0.05}}),
                        {"H"}));

  // S fails only once both middle firms are gone.
  out.push_back(fixture("diamond needing two shocks",
                        build({{"S", 100, 50, 12},
                               {"M1", 100, 60, 1},
                               {"M2", 100, 60, 1},
                               {"C", 100, 20, 50}},
                              {{"S", "M1", 0.3},
                               {"S", "M2", 0.3},
                               {"M1", "C", 0.5},
                               {"M2", "C", 0.5}}),
                        {"C"}));

  out.push_back(fixture("three-cycle",
                        build({{"A", 100, 60, 2}, {"B", 100, 60, 2}, {"C", 100, 60, 2}},
                              {{"A", "B", 0.5}, {"B", "C", 0.5}, {"C", "A", 0.5}}),
                        {"A"}));

  out.push_back(fixture("two triggers",
                        build({{"T1", 100, 20, 5},
                               {"T2", 100, 20, 5},
                               {"S", 100, 40, 30},
                               {"U", 100, 40, 1}},
                              {{"S", "T1", 0.3}, {"S", "T2", 0.3}, {"U", "S", 0.5}}),
                        {"T1", "T2"}));

  // Growing customers and GDP: live interaction terms are nonzero.
  out.push_back(fixture("six-firm tree with live demand",
                        build({{"R", 300, 80, 20, 280},
                               {"P", 150, 90, 4, 140},
                               {"Q", 150, 90, 30, 160},
                               {"X", 90, 50, 1, 85},
                               {"Y", 90, 60, 25, 80},
                               {"Z", 60, 30, 0.5, 60}},
                              {{"P", "R", 0.4},
                               {"Q", "R", 0.2},
                               {"X", "P", 0.6},
                               {"Y", "P", 0.3},
                               {"Z", "Q", 0.5},
                               {"Z", "Y", 0.2},
                               {"X", "Q", 0.1},
                               {"Z", "X", 0.4}}),
                        {"R"}, 1.03));

  out.push_back(fixture("well-capitalized economy",
                        build({{"A", 100, 50, 1e6}, {"B", 100, 50, 1e6}, {"C", 100, 50, 1e6}},
                              {{"A", "B", 0.9}, {"B", "C", 0.9}, {"A", "C", 0.9}}),
                        {"C"}));
  return out;
}

struct OracleOutcome {
  std::map<std::string, std::size_t> generation;  ///< bankrupt firm -> generation
};

/// Repeatedly evaluates every live firm that has a bankrupt customer, all
/// against the same bankrupt set, until nothing changes. Firms decide by
/// standing still. Written out from the model equations.
inline OracleOutcome brute_force_cascade(const chainbk::Economy& e,
                                         const chainbk::CascadeConfig& cfg) {
  const auto n = e.network.firm_count();
  std::vector<int> gen(n, -1);
  for (const auto& t : cfg.trigger_firms) gen[e.network.index_of(t)] = 0;
  const double g = cfg.gdp_ratio;
  for (int round = 1;; ++round) {
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < n; ++i) {
      if (gen[i] >= 0) continue;
      double terms = 0.0;
      bool exposed = false;
      for (const auto& edge : e.network.edges()) {
        if (edge.supplier != i) continue;
        const auto j = edge.customer;
        double ratio = e.states[j].revenue / e.states[j].prev_revenue;
        if (gen[j] >= 0) {
          exposed = true;
          ratio = cfg.policy == chainbk::BankruptRatioPolicy::pure_loss ? g - 1.0 : 0.0;
        }
        terms += edge.k * (ratio - g);
      }
      if (!exposed) continue;
      const auto& s = e.states[i];
      const auto& p = e.params[i];
      double revenue = s.revenue * (1.0 + terms);
      if (revenue <= 0.0) revenue = cfg.revenue_floor * s.revenue;
      const double cost = p.cost_coeff * std::pow(s.capital, p.alpha) * std::pow(s.labor, p.beta);
      const double equity = s.equity + revenue - cost - p.interest_rate * s.capital - s.labor;
      if (equity < 0.0) fresh.push_back(i);
    }
    if (fresh.empty()) break;
    for (auto i : fresh) gen[i] = round;
  }
  OracleOutcome out;
  for (std::size_t i = 0; i < n; ++i)
    if (gen[i] >= 0) out.generation[e.network.id(i)] = static_cast<std::size_t>(gen[i]);
  return out;
}

inline std::map<std::string, std::size_t> as_map(const chainbk::CascadeResult& r,
                                                 const chainbk::TransactionNetwork& net) {
  std::map<std::string, std::size_t> out;
  for (const auto& b : r.bankrupt) out[net.id(b.firm)] = b.generation;
  return out;
}

}  // namespace test
