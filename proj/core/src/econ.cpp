#include "chainbk/econ.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chainbk {

namespace {

bool non_negative(double x) { return std::isfinite(x) && x >= 0.0; }
bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void FirmParameters::validate() const {
  if (!non_negative(alpha) || !non_negative(beta) || !non_negative(cost_coeff) ||
      !non_negative(interest_rate) || !non_negative(noise_sigma))
    throw std::invalid_argument("firm parameters must be finite and non-negative");
}

void FirmState::validate() const {
  if (bankrupt) return;
  if (!positive(revenue) || !positive(prev_revenue) || !positive(capital) ||
      !positive(labor))
    throw std::invalid_argument("live firm needs positive revenue, capital and labor");
  if (!std::isfinite(equity)) throw std::invalid_argument("equity must be finite");
}

double MacroSeries::ratio(std::size_t t) const {
  if (t == 0 || t >= gdp.size()) throw std::out_of_range("gdp ratio index out of range");
  return gdp[t] / gdp[t - 1];
}

void MacroSeries::validate() const {
  for (std::size_t t = 0; t < gdp.size(); ++t)
    if (!positive(gdp[t]))
      throw std::invalid_argument("gdp must be positive (period index " + std::to_string(t) +
                                  ")");
}

void Economy::validate() const {
  if (params.size() != network.firm_count() || states.size() != network.firm_count())
    throw std::invalid_argument("economy: params/states do not match firm count");
  for (FirmIndex i = 0; i < size(); ++i) {
    try {
      params[i].validate();
      states[i].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("firm '" + network.id(i) + "': " + e.what());
    }
  }
}

double production_ratio(double capital_next, double labor_next, double capital_now,
                        double labor_now, const FirmParameters& params) {
  if (!(capital_next > 0.0) || !(labor_next > 0.0) || !(capital_now > 0.0) ||
      !(labor_now > 0.0))
    throw std::domain_error("production_ratio: capital and labor must be positive");
  return std::pow(capital_next / capital_now, params.alpha) *
         std::pow(labor_next / labor_now, params.beta);
}

double interaction_term(double k, double customer_ratio, double gdp_ratio) {
  return k * (customer_ratio - gdp_ratio);
}

double bankrupt_customer_term(double k, double gdp_ratio, BankruptRatioPolicy policy) {
  switch (policy) {
    case BankruptRatioPolicy::pure_loss:
      return -k;
    case BankruptRatioPolicy::zero_revenue:
      break;
  }
  return interaction_term(k, 0.0, gdp_ratio);
}

double revenue_next(const FirmState& state, const InvestmentDecision& decision,
                    const FirmParameters& params, double customer_terms_sum, double noise) {
  const double pr =
      production_ratio(decision.capital, decision.labor, state.capital, state.labor, params);
  return state.revenue * (pr + customer_terms_sum + params.noise_sigma * noise);
}

RevenueUpdate clamp_revenue(double raw, double current_revenue, double floor_fraction) {
  if (raw > 0.0) return {raw, false};
  return {floor_fraction * current_revenue, true};
}

double material_cost(const InvestmentDecision& decision, const FirmParameters& params) {
  if (params.cost_coeff == 0.0) return 0.0;
  return params.cost_coeff * std::pow(decision.capital, params.alpha) *
         std::pow(decision.labor, params.beta);
}

double profit(double revenue_next, double cost, const InvestmentDecision& decision,
              const FirmParameters& params) {
  return revenue_next - cost - params.interest_rate * decision.capital - decision.labor;
}

double customer_terms_sum(const Economy& economy, FirmIndex i, double gdp_ratio,
                          std::span<const std::uint8_t> bankrupt,
                          BankruptRatioPolicy policy) {
  double sum = 0.0;
  for (const Link& c : economy.network.customers(i)) {
    const bool failed = !bankrupt.empty() ? bankrupt[c.firm] != 0
                                          : economy.states[c.firm].bankrupt;
    sum += failed ? bankrupt_customer_term(c.k, gdp_ratio, policy)
                  : interaction_term(c.k, economy.states[c.firm].growth(), gdp_ratio);
  }
  return sum;
}

TermOutcome evaluate_term(const FirmState& state, const FirmParameters& params,
                          const InvestmentDecision& decision, double customer_terms,
                          double noise, double floor_fraction) {
  TermOutcome out;
  const auto rev = clamp_revenue(revenue_next(state, decision, params, customer_terms, noise),
                                 state.revenue, floor_fraction);
  out.revenue_next = rev.value;
  out.revenue_floored = rev.floored;
  out.cost = material_cost(decision, params);
  out.profit = profit(out.revenue_next, out.cost, decision, params);
  out.equity_end = equity_end_of_term(state.equity, out.profit);
  return out;
}

}  // namespace chainbk
