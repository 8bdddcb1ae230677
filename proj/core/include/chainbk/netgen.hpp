#pragma once

// Synthetic economies: transaction networks, parameters, GDP paths and
// forward-simulated panels that follow the firm dynamics exactly.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chainbk/econ.hpp"
#include "chainbk/game.hpp"
#include "chainbk/panel.hpp"

namespace chainbk {

enum class EdgeModel {
  random,      ///< each ordered pair independently with p = d / (N - 1)
  scale_free,  ///< preferential attachment, about d edges per new firm
  chain,       ///< F0 supplies F1 supplies F2 ...
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Defaults are illustrative choices, not estimates of any real economy.
struct GeneratorConfig {
  std::size_t firm_count = 100;
  EdgeModel edge_model = EdgeModel::random;
  double mean_out_degree = 2.0;
  std::size_t max_customers = 0;  ///< 0 = unlimited

  Range alpha{0.1, 0.6};
  Range beta{0.1, 0.6};
  double max_returns_to_scale = 0.95;  ///< redraw while alpha + beta >= this
  Range k{0.0, 0.3};
  Range cost_coeff{0.1, 0.5};
  double interest_rate = 0.05;
  double noise_sigma = 0.02;

  /// Initial capital; labor and revenue follow from the firm being at its
  /// interior optimum in period 0.
  Range capital{500.0, 1500.0};
  /// Initial equity as a multiple of initial revenue.
  Range equity_to_revenue{0.2, 1.0};

  double gdp_initial = 500.0;
  double gdp_growth = 0.01;
  double gdp_volatility = 0.01;

  /// Log-normal dispersion of realized K and L around the chosen decision.
  double decision_jitter = 0.6;
  std::size_t horizon = 11;
  bool noise = true;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Firm ids "F0000", "F0001", ...
std::string synthetic_firm_id(std::size_t i);

TransactionNetwork generate_network(const GeneratorConfig& config);

std::vector<FirmParameters> generate_parameters(const GeneratorConfig& config);

/// Period-0 states; prev_revenue equals revenue.
std::vector<FirmState> generate_initial_states(const std::vector<FirmParameters>& params,
                                               const GeneratorConfig& config);

/// G(0) = initial, G(t+1) = G(t) (1 + growth + volatility z); a non-positive
/// draw is redrawn.
MacroSeries generate_gdp(std::size_t horizon, double growth, double volatility,
                         std::uint64_t seed, double initial = 500.0);

struct SimulationOptions {
  std::size_t horizon = 11;
  std::uint64_t seed = 1;
  bool noise = true;
  double decision_jitter = 0.6;
  double revenue_floor = kDefaultRevenueFloor;
  GameConfig game;
  std::vector<int> periods;  ///< optional period labels, default 1..T
};

struct FloorEvent {
  std::string firm_id;
  int period = 0;
};

struct SimulationResult {
  PanelSeries panel;
  std::vector<FloorEvent> floor_events;
};

/// Runs the dynamics forward from `initial.states` (period 0) for
/// horizon - 1 steps. Each step solves the investment game, perturbs the
/// decision by the jitter, updates revenue (plus sigma * z when noise is on),
/// and rolls equity. The first step uses a GDP ratio of 1.
SimulationResult forward_simulate(const Economy& initial, const MacroSeries& gdp,
                                  const SimulationOptions& options);

struct SyntheticEconomy {
  Economy economy;  ///< period-0 states
  MacroSeries gdp;
  SimulationResult simulation;
};

SyntheticEconomy generate_economy(const GeneratorConfig& config);

/// Economy at the last period of a panel (states from period T-1, equity
/// carried forward).
Economy economy_at_end(const PanelSeries& panel, const TransactionNetwork& network,
                       const std::vector<FirmParameters>& params);

}  // namespace chainbk
