#include "chainbk/game.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chainbk/rng.hpp"

namespace chainbk {

void GameConfig::validate() const {
  if (!(bound_lower > 0.0) || !(bound_upper >= bound_lower))
    throw std::invalid_argument("game: decision bounds need 0 < lower <= upper");
  if (!(br_tolerance > 0.0)) throw std::invalid_argument("game: br_tolerance must be > 0");
  if (ga_population < 1 || ga_generations < 1 || ga_tournament_size < 1 || br_max_rounds < 1)
    throw std::invalid_argument("game: counts must be >= 1");
  if (!(ga_mutation_scale >= 0.0))
    throw std::invalid_argument("game: mutation scale must be >= 0");
}

DecisionBox decision_box(const FirmState& state, const GameConfig& config) {
  return {config.bound_lower * state.capital, config.bound_upper * state.capital,
          config.bound_lower * state.labor, config.bound_upper * state.labor};
}

double expected_payoff(const PayoffContext& context, const InvestmentDecision& decision) {
  const auto revenue =
      revenue_next(context.state, decision, context.params, context.customer_terms_sum, 0.0);
  return profit(revenue, material_cost(decision, context.params), decision, context.params);
}

double effective_scale(const PayoffContext& context) {
  const auto& s = context.state;
  const auto& p = context.params;
  return s.revenue / (std::pow(s.capital, p.alpha) * std::pow(s.labor, p.beta)) -
         p.cost_coeff;
}

namespace {

// argmax over [lo, hi] of c * x^a - price * x, with c > 0 and 0 <= a < 1.
double best_1d(double c, double a, double price, double lo, double hi) {
  if (a == 0.0) return lo;
  if (price == 0.0) return hi;
  const double x = std::exp((std::log(a * c) - std::log(price)) / (1.0 - a));
  return std::clamp(x, lo, hi);
}

// Higher payoff wins; ties go to smaller K, then smaller L.
bool better(double payoff_a, const InvestmentDecision& a, double payoff_b,
            const InvestmentDecision& b) {
  if (payoff_a != payoff_b) return payoff_a > payoff_b;
  if (a.capital != b.capital) return a.capital < b.capital;
  return a.labor < b.labor;
}

}  // namespace

std::optional<InvestmentDecision> best_response_closed_form(const PayoffContext& context,
                                                            const GameConfig& config) {
  const auto& p = context.params;
  const double scale = effective_scale(context);
  if (!(p.alpha + p.beta < 1.0) || !(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;

  const auto box = decision_box(context.state, config);
  const double r = p.interest_rate;

  // Payoff = scale * K^a L^b - r K - L + const. Strictly (or weakly) concave,
  // so the box optimum is the interior stationary point if it lies inside,
  // otherwise the 1-D optimum along one of the four faces.
  std::vector<InvestmentDecision> candidates;
  auto best_k = [&](double labor) {
    return best_1d(scale * std::pow(labor, p.beta), p.alpha, r, box.capital_lo, box.capital_hi);
  };
  auto best_l = [&](double capital) {
    return best_1d(scale * std::pow(capital, p.alpha), p.beta, 1.0, box.labor_lo,
                   box.labor_hi);
  };
  candidates.push_back({box.capital_lo, best_l(box.capital_lo)});
  candidates.push_back({box.capital_hi, best_l(box.capital_hi)});
  candidates.push_back({best_k(box.labor_lo), box.labor_lo});
  candidates.push_back({best_k(box.labor_hi), box.labor_hi});

  if (p.alpha > 0.0 && p.beta > 0.0 && r > 0.0) {
    // From the first-order conditions: K = alpha Y / r, L = beta Y with
    // Y = scale K^alpha L^beta.
    const double log_y = (std::log(scale) + p.alpha * std::log(p.alpha / r) +
                          p.beta * std::log(p.beta)) /
                         (1.0 - p.alpha - p.beta);
    const double y = std::exp(log_y);
    const InvestmentDecision interior{p.alpha * y / r, p.beta * y};
    if (std::isfinite(y) && interior.capital >= box.capital_lo &&
        interior.capital <= box.capital_hi && interior.labor >= box.labor_lo &&
        interior.labor <= box.labor_hi)
      candidates.push_back(interior);
  }

  InvestmentDecision best = candidates.front();
  double best_payoff = expected_payoff(context, best);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = expected_payoff(context, candidates[i]);
    if (better(v, candidates[i], best_payoff, best)) {
      best = candidates[i];
      best_payoff = v;
    }
  }
  return best;
}

InvestmentDecision best_response_ga(const PayoffContext& context, const GameConfig& config,
                                    std::uint64_t seed) {
  config.validate();
  const auto box = decision_box(context.state, config);
  const std::array<double, 2> lo{std::log(box.capital_lo), std::log(box.labor_lo)};
  const std::array<double, 2> hi{std::log(box.capital_hi), std::log(box.labor_hi)};
  const std::array<double, 2> width{hi[0] - lo[0], hi[1] - lo[1]};

  struct Individual {
    std::array<double, 2> genes;
    InvestmentDecision decision;
    double payoff;
  };
  auto make = [&](std::array<double, 2> g) {
    for (int d = 0; d < 2; ++d) g[d] = std::clamp(g[d], lo[d], hi[d]);
    InvestmentDecision dec{std::exp(g[0]), std::exp(g[1])};
    if (width[0] == 0.0) dec.capital = box.capital_lo;
    if (width[1] == 0.0) dec.labor = box.labor_lo;
    return Individual{g, dec, expected_payoff(context, dec)};
  };
  auto fitter = [](const Individual& a, const Individual& b) {
    return better(a.payoff, a.decision, b.payoff, b.decision);
  };

  const auto incumbent =
      make({std::log(context.state.capital), std::log(context.state.labor)});
  if (width[0] == 0.0 && width[1] == 0.0) return incumbent.decision;

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> blend(-0.25, 1.25);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, config.ga_population - 1);

  std::vector<Individual> population;
  population.reserve(config.ga_population);
  population.push_back(incumbent);
  while (population.size() < config.ga_population)
    population.push_back(make({lo[0] + unit(rng) * width[0], lo[1] + unit(rng) * width[1]}));

  auto tournament = [&]() -> const Individual& {
    const Individual* winner = &population[pick(rng)];
    for (std::size_t i = 1; i < config.ga_tournament_size; ++i) {
      const Individual& c = population[pick(rng)];
      if (fitter(c, *winner)) winner = &c;
    }
    return *winner;
  };

  std::vector<Individual> next;
  next.reserve(config.ga_population);
  for (std::size_t gen = 0; gen < config.ga_generations; ++gen) {
    next.clear();
    next.push_back(*std::min_element(population.begin(), population.end(), fitter));
    while (next.size() < config.ga_population) {
      const Individual& a = tournament();
      const Individual& b = tournament();
      std::array<double, 2> child{};
      for (int d = 0; d < 2; ++d) {
        child[d] = a.genes[d] + blend(rng) * (b.genes[d] - a.genes[d]);
        if (unit(rng) < 0.5) child[d] += gauss(rng) * config.ga_mutation_scale * width[d];
      }
      next.push_back(make(child));
    }
    population.swap(next);
  }
  return std::min_element(population.begin(), population.end(), fitter)->decision;
}

BestResponse best_response(const PayoffContext& context, const GameConfig& config,
                           std::uint64_t seed) {
  if (config.method != SolverMethod::genetic) {
    if (auto d = best_response_closed_form(context, config))
      return {*d, ResponseSolver::closed_form};
  }
  return {best_response_ga(context, config, seed), ResponseSolver::genetic};
}

PayoffContext payoff_context(const Economy& economy, FirmIndex i, double gdp_ratio) {
  return {economy.states[i], economy.params[i], gdp_ratio,
          customer_terms_sum(economy, i, gdp_ratio)};
}

NashResult nash_solve(const Economy& economy, double gdp_ratio, const GameConfig& config) {
  config.validate();
  const std::size_t n = economy.size();
  NashResult out;
  out.decisions.resize(n);
  out.solvers.assign(n, ResponseSolver::closed_form);
  for (FirmIndex i = 0; i < n; ++i)
    out.decisions[i] = {economy.states[i].capital, economy.states[i].labor};

  // The interaction sum uses period-t revenues only, so every context is
  // fixed across rounds; the loop still checks the fixed point explicitly.
  std::vector<PayoffContext> contexts;
  contexts.reserve(n);
  for (FirmIndex i = 0; i < n; ++i) contexts.push_back(payoff_context(economy, i, gdp_ratio));

  std::vector<InvestmentDecision> next(n);
  for (std::size_t round = 1; round <= config.br_max_rounds; ++round) {
    double change = 0.0;
    for (FirmIndex i = 0; i < n; ++i) {
      if (economy.states[i].bankrupt) {
        next[i] = out.decisions[i];
        continue;
      }
      const auto br =
          best_response(contexts[i], config, firm_seed(config.rng_seed, economy.network.id(i)));
      next[i] = br.decision;
      out.solvers[i] = br.solver;
      const auto& prev = out.decisions[i];
      change = std::max({change, std::abs(next[i].capital - prev.capital) / prev.capital,
                         std::abs(next[i].labor - prev.labor) / prev.labor});
    }
    out.decisions.swap(next);
    out.rounds = round;
    out.max_relative_change = change;
    if (change < config.br_tolerance) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace chainbk
