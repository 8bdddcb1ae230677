#pragma once

// Investment decisions: each firm picks next-period (K, L) to maximize its
// one-step profit. A closed-form best response covers the concave case
// (alpha + beta < 1); a real-valued genetic algorithm covers everything.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "chainbk/econ.hpp"

namespace chainbk {

enum class SolverMethod {
  automatic,    ///< closed form when it applies, GA otherwise
  closed_form,  ///< closed form, falling back to GA when it does not apply
  genetic,      ///< always GA
};

struct GameConfig {
  /// Decisions are searched in [lower, upper] x current K and L.
  double bound_lower = 0.25;
  double bound_upper = 4.0;
  std::size_t ga_population = 64;
  std::size_t ga_generations = 200;
  /// Mutation standard deviation as a fraction of the (log-space) box width.
  double ga_mutation_scale = 0.05;
  std::size_t ga_tournament_size = 4;
  /// Relative tolerance for the best-response fixed point.
  double br_tolerance = 1e-6;
  std::size_t br_max_rounds = 50;
  std::uint64_t rng_seed = 0;
  SolverMethod method = SolverMethod::automatic;

  void validate() const;
};

/// Everything one firm sees when deciding. The interaction sum is taken from
/// the last observed period and held fixed.
struct PayoffContext {
  FirmState state;
  FirmParameters params;
  double gdp_ratio = 1.0;
  double customer_terms_sum = 0.0;
};

struct DecisionBox {
  double capital_lo = 0.0;
  double capital_hi = 0.0;
  double labor_lo = 0.0;
  double labor_hi = 0.0;
};

DecisionBox decision_box(const FirmState& state, const GameConfig& config);

/// Profit Pi(t+1) for a candidate decision, noise off.
double expected_payoff(const PayoffContext& context, const InvestmentDecision& decision);

/// R(t)/(K^alpha L^beta) - A: the coefficient on K'^alpha L'^beta in the payoff.
double effective_scale(const PayoffContext& context);

/// Exact maximizer of expected_payoff over the decision box when
/// alpha + beta < 1 and effective_scale() > 0. Returns nullopt otherwise
/// (no concave optimum; use the GA).
std::optional<InvestmentDecision> best_response_closed_form(const PayoffContext& context,
                                                            const GameConfig& config);

/// Elitist real-valued GA over (log K, log L) inside the decision box. The
/// current (K, L) is seeded into the initial population, so the result never
/// pays less than standing still. Deterministic for a given seed.
InvestmentDecision best_response_ga(const PayoffContext& context, const GameConfig& config,
                                    std::uint64_t seed);

enum class ResponseSolver { closed_form, genetic };

struct BestResponse {
  InvestmentDecision decision;
  ResponseSolver solver = ResponseSolver::closed_form;
};

BestResponse best_response(const PayoffContext& context, const GameConfig& config,
                           std::uint64_t seed);

/// Context of firm i in `economy` for the given GDP ratio.
PayoffContext payoff_context(const Economy& economy, FirmIndex i, double gdp_ratio);

struct NashResult {
  std::vector<InvestmentDecision> decisions;
  std::vector<ResponseSolver> solvers;
  bool converged = false;
  std::size_t rounds = 0;
  double max_relative_change = 0.0;
};

/// Iterated simultaneous best response from the incumbent decisions. Each
/// firm's GA stream is seeded from config.rng_seed and its id, so the result
/// does not depend on firm order. Bankrupt firms keep their current K, L.
NashResult nash_solve(const Economy& economy, double gdp_ratio, const GameConfig& config);

}  // namespace chainbk
