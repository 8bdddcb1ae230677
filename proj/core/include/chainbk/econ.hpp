#pragma once

// Firm-level dynamics: revenue evolution with customer interaction, material
// cost, profit, end-of-term equity and the capital-deficit test.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chainbk/network.hpp"

namespace chainbk {

/// Per-firm structural constants.
struct FirmParameters {
  double alpha = 0.0;          ///< capital elasticity
  double beta = 0.0;           ///< labor elasticity
  double cost_coeff = 0.0;     ///< material cost scale A
  double interest_rate = 0.0;  ///< rate r charged on capital
  double noise_sigma = 0.0;    ///< revenue growth volatility

  /// Throws std::invalid_argument if any field is negative or non-finite.
  void validate() const;
};

/// Financials of one firm at period t. `equity` is the equity at the
/// beginning of the coming term.
struct FirmState {
  double revenue = 0.0;
  double prev_revenue = 0.0;
  double capital = 0.0;
  double labor = 0.0;
  double equity = 0.0;
  bool bankrupt = false;

  double growth() const { return revenue / prev_revenue; }
  /// Throws std::invalid_argument unless R, R(t-1), K, L are all positive
  /// for a live firm.
  void validate() const;
};

/// Next-period capital and labor chosen by the firm.
struct InvestmentDecision {
  double capital = 0.0;
  double labor = 0.0;

  friend bool operator==(const InvestmentDecision&, const InvestmentDecision&) = default;
};

/// Economy-wide GDP path G(t).
struct MacroSeries {
  std::vector<double> gdp;

  std::size_t size() const noexcept { return gdp.size(); }
  bool empty() const noexcept { return gdp.empty(); }
  /// G(t)/G(t-1); requires 1 <= t < size().
  double ratio(std::size_t t) const;
  void validate() const;
};

/// How a bankrupt customer enters its suppliers' interaction terms.
enum class BankruptRatioPolicy {
  zero_revenue,  ///< customer ratio 0: f = -k * G(t)/G(t-1)
  pure_loss,     ///< f = -k
};

/// Network plus per-firm parameters and current state, all indexed by
/// FirmIndex.
struct Economy {
  TransactionNetwork network;
  std::vector<FirmParameters> params;
  std::vector<FirmState> states;

  std::size_t size() const noexcept { return network.firm_count(); }
  void validate() const;
};

/// (K_next/K_now)^alpha * (L_next/L_now)^beta. Throws std::domain_error on a
/// non-positive argument.
double production_ratio(double capital_next, double labor_next, double capital_now,
                        double labor_now, const FirmParameters& params);

/// k * (customer_ratio - gdp_ratio).
double interaction_term(double k, double customer_ratio, double gdp_ratio);

/// Interaction term for an edge whose customer has failed.
double bankrupt_customer_term(double k, double gdp_ratio, BankruptRatioPolicy policy);

/// Raw R(t+1); may be <= 0, see clamp_revenue().
double revenue_next(const FirmState& state, const InvestmentDecision& decision,
                    const FirmParameters& params, double customer_terms_sum,
                    double noise = 0.0);

inline constexpr double kDefaultRevenueFloor = 1e-6;

struct RevenueUpdate {
  double value = 0.0;
  bool floored = false;
};

/// Replaces a non-positive revenue by floor_fraction * current_revenue.
RevenueUpdate clamp_revenue(double raw, double current_revenue,
                            double floor_fraction = kDefaultRevenueFloor);

/// A * K^alpha * L^beta.
double material_cost(const InvestmentDecision& decision, const FirmParameters& params);

/// R(t+1) - C(t+1) - r K(t+1) - L(t+1). Labor carries a unit wage.
double profit(double revenue_next, double cost, const InvestmentDecision& decision,
              const FirmParameters& params);

inline double equity_end_of_term(double equity_begin, double profit_value) {
  return equity_begin + profit_value;
}

/// Strict capital deficit; zero equity is solvent.
inline bool is_bankrupt(double equity_end) { return equity_end < 0.0; }

/// Sum of interaction terms over firm i's customers. `bankrupt` is either
/// empty or holds one flag per firm; flagged customers contribute per
/// `policy`, live ones through their observed growth ratio.
double customer_terms_sum(const Economy& economy, FirmIndex i, double gdp_ratio,
                          std::span<const std::uint8_t> bankrupt = {},
                          BankruptRatioPolicy policy = BankruptRatioPolicy::zero_revenue);

/// Full one-term evaluation of a firm given its decision and the
/// interaction sum.
struct TermOutcome {
  double revenue_next = 0.0;
  bool revenue_floored = false;
  double cost = 0.0;
  double profit = 0.0;
  double equity_end = 0.0;
};

TermOutcome evaluate_term(const FirmState& state, const FirmParameters& params,
                          const InvestmentDecision& decision, double customer_terms,
                          double noise = 0.0,
                          double floor_fraction = kDefaultRevenueFloor);

}  // namespace chainbk
