#include "chainbk/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "chainbk/rng.hpp"

namespace chainbk {

namespace {

enum Stream : std::uint64_t { kNetwork = 1, kParams, kStates, kGdp, kSimulation };

Rng stream(std::uint64_t seed, Stream s) { return Rng(splitmix64(splitmix64(seed) + s)); }

double draw(Rng& rng, Range r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

void check_range(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || (positive ? !(r.lo > 0.0) : !(r.lo >= 0.0)))
    throw std::invalid_argument(std::string("generator: bad range for ") + name);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (firm_count < 1) throw std::invalid_argument("generator: firm_count must be >= 1");
  if (horizon < 3) throw std::invalid_argument("generator: horizon must be >= 3");
  if (!(mean_out_degree >= 0.0)) throw std::invalid_argument("generator: bad mean degree");
  check_range(alpha, "alpha", true);
  check_range(beta, "beta", true);
  check_range(k, "k", false);
  check_range(cost_coeff, "cost_coeff", false);
  check_range(capital, "capital", true);
  check_range(equity_to_revenue, "equity_to_revenue", false);
  if (!(interest_rate > 0.0)) throw std::invalid_argument("generator: interest rate must be > 0");
  if (!(noise_sigma >= 0.0) || !(decision_jitter >= 0.0))
    throw std::invalid_argument("generator: noise and jitter must be >= 0");
  if (!(alpha.lo + beta.lo < max_returns_to_scale) || !(max_returns_to_scale <= 1.0))
    throw std::invalid_argument("generator: alpha/beta ranges cannot satisfy returns-to-scale cap");
  if (!(gdp_initial > 0.0)) throw std::invalid_argument("generator: gdp_initial must be > 0");
}

std::string synthetic_firm_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "F%04zu", i);
  return buf;
}

TransactionNetwork generate_network(const GeneratorConfig& config) {
  config.validate();
  const std::size_t n = config.firm_count;
  TransactionNetwork net;
  for (std::size_t i = 0; i < n; ++i) net.add_firm(synthetic_firm_id(i));
  Rng rng = stream(config.seed, kNetwork);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto capped = [&](FirmIndex supplier) {
    return config.max_customers != 0 && net.customers(supplier).size() >= config.max_customers;
  };

  switch (config.edge_model) {
    case EdgeModel::random: {
      if (n < 2) break;
      const double p = std::min(1.0, config.mean_out_degree / static_cast<double>(n - 1));
      for (FirmIndex s = 0; s < n; ++s)
        for (FirmIndex c = 0; c < n; ++c) {
          if (s == c) continue;
          const bool take = unit(rng) < p;
          const double k = draw(rng, config.k);
          if (take && !capped(s)) net.add_edge(s, c, k);
        }
      break;
    }
    case EdgeModel::scale_free: {
      const auto m = static_cast<std::size_t>(std::max(1.0, std::round(config.mean_out_degree)));
      std::vector<double> weight(n, 1.0);
      for (FirmIndex i = 1; i < n; ++i) {
        std::vector<FirmIndex> chosen;
        const std::size_t want = std::min(m, i);
        while (chosen.size() < want) {
          std::discrete_distribution<std::size_t> pick(weight.begin(), weight.begin() + i);
          const FirmIndex t = pick(rng);
          if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
        }
        for (FirmIndex t : chosen) {
          const bool supplies = unit(rng) < 0.5;
          const double k = draw(rng, config.k);
          FirmIndex s = supplies ? i : t;
          FirmIndex c = supplies ? t : i;
          if (capped(s)) std::swap(s, c);
          if (capped(s)) continue;
          net.add_edge(s, c, k);
          weight[i] += 1.0;
          weight[t] += 1.0;
        }
      }
      break;
    }
    case EdgeModel::chain:
      for (FirmIndex i = 0; i + 1 < n; ++i) net.add_edge(i, i + 1, draw(rng, config.k));
      break;
  }
  return net;
}

std::vector<FirmParameters> generate_parameters(const GeneratorConfig& config) {
  config.validate();
  Rng rng = stream(config.seed, kParams);
  std::vector<FirmParameters> out(config.firm_count);
  for (auto& p : out) {
    do {
      p.alpha = draw(rng, config.alpha);
      p.beta = draw(rng, config.beta);
    } while (p.alpha + p.beta >= config.max_returns_to_scale);
    p.cost_coeff = draw(rng, config.cost_coeff);
    p.interest_rate = config.interest_rate;
    p.noise_sigma = config.noise_sigma;
  }
  return out;
}

std::vector<FirmState> generate_initial_states(const std::vector<FirmParameters>& params,
                                               const GeneratorConfig& config) {
  Rng rng = stream(config.seed, kStates);
  std::vector<FirmState> out;
  out.reserve(params.size());
  for (const auto& p : params) {
    // Place the firm at its interior optimum: K = alpha Y / r, L = beta Y,
    // with the revenue scale chosen so that Y is consistent.
    const double capital = draw(rng, config.capital);
    const double y = p.interest_rate * capital / p.alpha;
    const double labor = p.beta * y;
    const double scale = std::pow(y, 1.0 - p.alpha - p.beta) /
                         (std::pow(p.alpha / p.interest_rate, p.alpha) * std::pow(p.beta, p.beta));
    const double revenue =
        (scale + p.cost_coeff) * std::pow(capital, p.alpha) * std::pow(labor, p.beta);
    const double equity = draw(rng, config.equity_to_revenue) * revenue;
    out.push_back({revenue, revenue, capital, labor, equity, false});
  }
  return out;
}

MacroSeries generate_gdp(std::size_t horizon, double growth, double volatility,
                         std::uint64_t seed, double initial) {
  if (horizon < 1) throw std::invalid_argument("gdp: horizon must be >= 1");
  if (!(initial > 0.0)) throw std::invalid_argument("gdp: initial value must be > 0");
  Rng rng(splitmix64(seed));
  MacroSeries out;
  out.gdp.reserve(horizon);
  out.gdp.push_back(initial);
  while (out.gdp.size() < horizon) {
    double factor = 0.0;
    do {
      factor = 1.0 + growth + (volatility > 0.0 ? volatility * normal(rng) : 0.0);
    } while (!(factor > 0.0));
    out.gdp.push_back(out.gdp.back() * factor);
  }
  return out;
}

SimulationResult forward_simulate(const Economy& initial, const MacroSeries& gdp,
                                  const SimulationOptions& options) {
  initial.validate();
  const std::size_t n = initial.size();
  const std::size_t horizon = options.horizon;
  if (horizon < 3) throw std::invalid_argument("simulate: horizon must be >= 3");
  if (gdp.size() < horizon) throw std::invalid_argument("simulate: gdp shorter than horizon");
  gdp.validate();

  SimulationResult out;
  auto& panel = out.panel;
  if (options.periods.empty()) {
    panel.periods.resize(horizon);
    std::iota(panel.periods.begin(), panel.periods.end(), 1);
  } else {
    if (options.periods.size() != horizon)
      throw std::invalid_argument("simulate: period labels do not match horizon");
    panel.periods = options.periods;
  }
  panel.firm_ids = initial.network.firm_ids();
  panel.firms.resize(n);
  panel.gdp.gdp.assign(gdp.gdp.begin(), gdp.gdp.begin() + static_cast<std::ptrdiff_t>(horizon));

  Economy economy = initial;
  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (FirmIndex i = 0; i < n; ++i)
    rngs.emplace_back(firm_seed(options.seed, economy.network.id(i), kSimulation));

  auto record = [&](FirmIndex i) {
    const auto& s = economy.states[i];
    auto& series = panel.firms[i];
    series.revenue.push_back(s.revenue);
    series.capital.push_back(s.capital);
    series.labor.push_back(s.labor);
    series.equity.push_back(s.equity);
  };
  for (FirmIndex i = 0; i < n; ++i) record(i);

  std::vector<FirmState> next(n);
  for (std::size_t t = 0; t + 1 < horizon; ++t) {
    const double g = t == 0 ? 1.0 : gdp.ratio(t);
    const auto nash = nash_solve(economy, g, options.game);
    for (FirmIndex i = 0; i < n; ++i) {
      const auto& state = economy.states[i];
      const double z_capital = normal(rngs[i]);
      const double z_labor = normal(rngs[i]);
      const double z_revenue = normal(rngs[i]);
      InvestmentDecision decision = nash.decisions[i];
      decision.capital *= std::exp(options.decision_jitter * z_capital);
      decision.labor *= std::exp(options.decision_jitter * z_labor);
      const double terms = customer_terms_sum(economy, i, g);
      const auto term = evaluate_term(state, economy.params[i], decision, terms,
                                      options.noise ? z_revenue : 0.0, options.revenue_floor);
      if (term.revenue_floored)
        out.floor_events.push_back({economy.network.id(i), panel.periods[t + 1]});
      next[i] = {term.revenue_next, state.revenue, decision.capital, decision.labor,
                 term.equity_end, false};
    }
    economy.states = next;
    for (FirmIndex i = 0; i < n; ++i) record(i);
  }
  return out;
}

SyntheticEconomy generate_economy(const GeneratorConfig& config) {
  config.validate();
  SyntheticEconomy out;
  out.economy.network = generate_network(config);
  out.economy.params = generate_parameters(config);
  out.economy.states = generate_initial_states(out.economy.params, config);
  out.gdp = generate_gdp(config.horizon, config.gdp_growth, config.gdp_volatility,
                         splitmix64(config.seed) + kGdp, config.gdp_initial);
  SimulationOptions sim;
  sim.horizon = config.horizon;
  sim.seed = splitmix64(config.seed) + kSimulation;
  sim.noise = config.noise;
  sim.decision_jitter = config.decision_jitter;
  sim.game.rng_seed = config.seed;
  out.simulation = forward_simulate(out.economy, out.gdp, sim);
  return out;
}

Economy economy_at_end(const PanelSeries& panel, const TransactionNetwork& network,
                       const std::vector<FirmParameters>& params) {
  if (panel.horizon() < 2) throw std::invalid_argument("panel needs at least two periods");
  if (params.size() != network.firm_count())
    throw std::invalid_argument("need one parameter set per network firm");
  Economy e;
  e.network = network;
  e.params = params;
  e.states.reserve(network.firm_count());
  for (FirmIndex i = 0; i < network.firm_count(); ++i) {
    auto f = panel.find(network.id(i));
    if (!f) throw std::invalid_argument("firm '" + network.id(i) + "' has no panel series");
    e.states.push_back(panel.state_at(*f, panel.horizon() - 1));
  }
  e.validate();
  return e;
}

}  // namespace chainbk
