#include "chainbk/cascade.hpp"

#include <algorithm>
#include <stdexcept>

#include "chainbk/rng.hpp"

namespace chainbk {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::equity_sufficient:
      return "equity-sufficient";
    case StopReason::link_too_weak:
      return "link-too-weak";
    case StopReason::not_reached:
      return "not-reached";
  }
  return "unknown";
}

std::string_view to_string(BankruptRatioPolicy policy) {
  return policy == BankruptRatioPolicy::pure_loss ? "pure-loss" : "zero-revenue";
}

std::optional<std::size_t> CascadeResult::generation_of(FirmIndex firm) const {
  for (const auto& b : bankrupt)
    if (b.firm == firm) return b.generation;
  return std::nullopt;
}

namespace {

EquityTrace evaluate_supplier(const Economy& economy,
                              std::span<const InvestmentDecision> decisions,
                              std::span<const std::uint8_t> bankrupt, FirmIndex i,
                              const CascadeConfig& config, std::size_t generation,
                              const GameConfig& game) {
  const auto& state = economy.states[i];
  const auto& params = economy.params[i];
  const double terms =
      customer_terms_sum(economy, i, config.gdp_ratio, bankrupt, config.policy);
  InvestmentDecision decision = decisions[i];
  if (!config.freeze_decisions) {
    const PayoffContext ctx{state, params, config.gdp_ratio, terms};
    decision = best_response(ctx, game, firm_seed(game.rng_seed, economy.network.id(i))).decision;
  }
  const auto term = evaluate_term(state, params, decision, terms, 0.0, config.revenue_floor);
  return {i, generation, state.equity, term.profit, term.equity_end, term.revenue_floored};
}

}  // namespace

StepOutcome propagate_step(const Economy& economy,
                           std::span<const InvestmentDecision> decisions,
                           std::span<const std::uint8_t> bankrupt, const CascadeConfig& config,
                           std::size_t generation, const GameConfig& game) {
  const std::size_t n = economy.size();
  if (bankrupt.size() != n || decisions.size() != n)
    throw std::invalid_argument("cascade: flags/decisions do not match firm count");

  std::vector<std::uint8_t> exposed(n, 0);
  for (FirmIndex j = 0; j < n; ++j) {
    if (!bankrupt[j]) continue;
    for (const Link& s : economy.network.suppliers(j))
      if (!bankrupt[s.firm] && !economy.states[s.firm].bankrupt) exposed[s.firm] = 1;
  }

  StepOutcome out;
  for (FirmIndex i = 0; i < n; ++i) {
    if (!exposed[i]) continue;
    auto trace = evaluate_supplier(economy, decisions, bankrupt, i, config, generation, game);
    if (is_bankrupt(trace.equity_end)) out.newly_bankrupt.push_back(i);
    out.traces.push_back(trace);
  }
  return out;
}

CascadeResult run_cascade(const Economy& economy, const CascadeConfig& config,
                          std::span<const InvestmentDecision> decisions,
                          const GameConfig& game) {
  const std::size_t n = economy.size();
  if (decisions.size() != n)
    throw std::invalid_argument("cascade: need one decision per firm");
  if (config.trigger_firms.empty()) throw std::invalid_argument("cascade: no trigger firm");
  const std::size_t max_generations = config.max_generations.value_or(n);
  if (max_generations < 1) throw std::invalid_argument("cascade: max_generations must be >= 1");

  CascadeResult result;
  std::vector<std::uint8_t> bankrupt(n, 0);
  for (const auto& id : config.trigger_firms) {
    const FirmIndex t = economy.network.index_of(id);
    if (economy.states[t].bankrupt)
      throw std::invalid_argument("cascade: trigger '" + id + "' is already bankrupt");
    if (!bankrupt[t]) {
      bankrupt[t] = 1;
      result.bankrupt.push_back({t, 0});
    }
  }
  std::sort(result.bankrupt.begin(), result.bankrupt.end(),
            [](const BankruptFirm& a, const BankruptFirm& b) { return a.firm < b.firm; });
  result.generations_run = 1;

  std::vector<std::optional<EquityTrace>> latest(n);
  bool capped = true;
  while (result.generations_run < max_generations) {
    const std::size_t generation = result.generations_run;
    auto step = propagate_step(economy, decisions, bankrupt, config, generation, game);
    for (const auto& tr : step.traces) latest[tr.firm] = tr;
    if (step.newly_bankrupt.empty()) {
      capped = false;
      break;
    }
    for (FirmIndex i : step.newly_bankrupt) {
      bankrupt[i] = 1;
      result.bankrupt.push_back({i, generation});
    }
    ++result.generations_run;
  }

  // With the generation cap hit, firms exposed to the last generation were
  // never evaluated against it.
  std::vector<std::uint8_t> fresh(n, 0);
  if (capped)
    for (const auto& b : result.bankrupt)
      if (b.generation + 1 == result.generations_run) fresh[b.firm] = 1;

  for (FirmIndex i = 0; i < n; ++i) {
    if (latest[i]) result.equity_trace.push_back(*latest[i]);
    if (bankrupt[i] || economy.states[i].bankrupt) continue;
    const auto customers = economy.network.customers(i);
    const bool unseen = std::any_of(customers.begin(), customers.end(),
                                    [&](const Link& c) { return fresh[c.firm] != 0; });
    if (unseen) {
      result.survivors.push_back({i, StopReason::not_reached});
    } else if (latest[i]) {
      // Solvent even without starting equity: the link shock was too small
      // to produce a loss. Otherwise equity absorbed the loss.
      const bool weak = !is_bankrupt(latest[i]->profit);
      result.survivors.push_back(
          {i, weak ? StopReason::link_too_weak : StopReason::equity_sufficient});
    }
  }
  return result;
}

CascadeResult run_cascade(const Economy& economy, const CascadeConfig& config,
                          const GameConfig& game) {
  const auto nash = nash_solve(economy, config.gdp_ratio, game);
  return run_cascade(economy, config, nash.decisions, game);
}

}  // namespace chainbk
