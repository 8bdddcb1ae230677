#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "chainbk/calibration.hpp"
#include "chainbk/cascade.hpp"
#include "chainbk/econ.hpp"
#include "chainbk/game.hpp"
#include "chainbk/netgen.hpp"

namespace test {

inline chainbk::FirmState state(double revenue, double capital, double labor, double equity,
                                double prev_revenue = 0.0) {
  return {revenue, prev_revenue > 0.0 ? prev_revenue : revenue, capital, labor, equity, false};
}

inline chainbk::FirmParameters params(double alpha, double beta, double a = 0.0,
                                      double r = 0.0, double sigma = 0.0) {
  return {alpha, beta, a, r, sigma};
}

/// Decisions equal to current K, L.
inline std::vector<chainbk::InvestmentDecision> stand_still(const chainbk::Economy& e) {
  std::vector<chainbk::InvestmentDecision> out;
  for (const auto& s : e.states) out.push_back({s.capital, s.labor});
  return out;
}

/// Customer pointers of firm f in panel order matching network customers.
inline std::vector<const chainbk::FirmSeries*> customer_series(
    const chainbk::PanelSeries& panel, const chainbk::TransactionNetwork& net,
    chainbk::FirmIndex f) {
  std::vector<const chainbk::FirmSeries*> out;
  for (const auto& c : net.customers(f)) out.push_back(&panel.firms[*panel.find(net.id(c.firm))]);
  return out;
}

/// Random instance with alpha + beta < 0.95 whose unconstrained optimum lies
/// inside the default decision box: K* and L* are placed at 0.4x..2.5x the
/// incumbent and R(t) is solved from the first-order conditions.
template <typename Rng>
chainbk::PayoffContext random_concave_context(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  chainbk::PayoffContext c;
  auto& p = c.params;
  do {
    p.alpha = draw(0.1, 0.6);
    p.beta = draw(0.1, 0.6);
  } while (p.alpha + p.beta >= 0.95);
  p.cost_coeff = draw(0.1, 0.5);
  p.interest_rate = draw(0.02, 0.1);
  const double k_star = draw(50.0, 1500.0);
  const double y = p.interest_rate * k_star / p.alpha;
  const double l_star = p.beta * y;
  c.state.capital = k_star / draw(0.4, 2.5);
  c.state.labor = l_star / draw(0.4, 2.5);
  c.customer_terms_sum = draw(-0.05, 0.05);
  // Payoff = R (1 + s) ratio - A K'^a L'^b - ...; solve for R giving scale B.
  const double b = std::pow(y, 1.0 - p.alpha - p.beta) /
                   (std::pow(p.alpha / p.interest_rate, p.alpha) * std::pow(p.beta, p.beta));
  const double base = std::pow(c.state.capital, p.alpha) * std::pow(c.state.labor, p.beta);
  c.state.revenue = (b + p.cost_coeff) * base;
  c.state.prev_revenue = c.state.revenue;
  c.state.equity = c.state.revenue;
  return c;
}

/// Argmax of the expected payoff over an n x n grid spanning the decision
/// box, evenly spaced in log K and log L (the box is multiplicative around
/// the incumbent). Ties keep the first point: smaller K, then smaller L.
/// Steps are in log units.
struct GridArgmax {
  chainbk::InvestmentDecision decision;
  double payoff = 0.0;
  double log_capital_step = 0.0;
  double log_labor_step = 0.0;
};

inline GridArgmax grid_argmax(const chainbk::PayoffContext& c, const chainbk::GameConfig& cfg,
                              std::size_t n) {
  const auto box = chainbk::decision_box(c.state, cfg);
  const double k0 = std::log(box.capital_lo), l0 = std::log(box.labor_lo);
  GridArgmax best;
  best.log_capital_step = (std::log(box.capital_hi) - k0) / static_cast<double>(n - 1);
  best.log_labor_step = (std::log(box.labor_hi) - l0) / static_cast<double>(n - 1);
  best.payoff = -HUGE_VAL;
  for (std::size_t a = 0; a < n; ++a) {
    const double k = std::exp(k0 + best.log_capital_step * static_cast<double>(a));
    for (std::size_t b = 0; b < n; ++b) {
      const double l = std::exp(l0 + best.log_labor_step * static_cast<double>(b));
      const double v = chainbk::expected_payoff(c, {k, l});
      if (v > best.payoff) {
        best.payoff = v;
        best.decision = {k, l};
      }
    }
  }
  return best;
}

/// Distance between a decision and the grid argmax, in grid cells (max over
/// the two axes).
inline double grid_cells(const GridArgmax& g, const chainbk::InvestmentDecision& d) {
  return std::max(std::abs(std::log(d.capital / g.decision.capital)) / g.log_capital_step,
                  std::abs(std::log(d.labor / g.decision.labor)) / g.log_labor_step);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("chainbk_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace test
