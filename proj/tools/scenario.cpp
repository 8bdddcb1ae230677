#include "scenario.hpp"

#include <fstream>
#include <stdexcept>

namespace chainbk::cli {

namespace {

Json range_json(const Range& r) { return Json::array({r.lo, r.hi}); }

Range range_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("range must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_range(const Json& j, const char* key, Range& out) {
  if (j.contains(key)) out = range_from(j.at(key));
}

}  // namespace

EdgeModel parse_edge_model(const std::string& s) {
  if (s == "random") return EdgeModel::random;
  if (s == "scale-free") return EdgeModel::scale_free;
  if (s == "chain") return EdgeModel::chain;
  throw std::invalid_argument("unknown edge model '" + s + "'");
}

std::string edge_model_name(EdgeModel m) {
  switch (m) {
    case EdgeModel::random: return "random";
    case EdgeModel::scale_free: return "scale-free";
    case EdgeModel::chain: return "chain";
  }
  return "random";
}

BankruptRatioPolicy parse_policy(const std::string& s) {
  if (s == "zero-revenue") return BankruptRatioPolicy::zero_revenue;
  if (s == "pure-loss") return BankruptRatioPolicy::pure_loss;
  throw std::invalid_argument("unknown policy '" + s + "'");
}

Json to_json(const ScenarioConfig& c) {
  const auto& g = c.generator;
  const auto& f = c.calibration;
  const auto& gm = c.game;
  Json j;
  j["panel"] = c.panel;
  j["edges"] = c.edges;
  j["gdp"] = c.gdp;
  j["params"] = c.params;
  j["fit"] = c.fit;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["generator"] = {{"firms", g.firm_count},
                    {"edge_model", edge_model_name(g.edge_model)},
                    {"mean_degree", g.mean_out_degree},
                    {"max_customers", g.max_customers},
                    {"alpha", range_json(g.alpha)},
                    {"beta", range_json(g.beta)},
                    {"max_returns_to_scale", g.max_returns_to_scale},
                    {"k", range_json(g.k)},
                    {"cost_coeff", range_json(g.cost_coeff)},
                    {"interest_rate", g.interest_rate},
                    {"sigma", g.noise_sigma},
                    {"capital", range_json(g.capital)},
                    {"equity_to_revenue", range_json(g.equity_to_revenue)},
                    {"gdp_initial", g.gdp_initial},
                    {"gdp_growth", g.gdp_growth},
                    {"gdp_volatility", g.gdp_volatility},
                    {"decision_jitter", g.decision_jitter},
                    {"periods", g.horizon},
                    {"noise", g.noise}};
  j["calibration"] = {{"gradient_tolerance", f.gradient_tolerance},
                      {"max_iterations", f.max_iterations},
                      {"armijo", f.armijo},
                      {"elasticity_bounds", Json::array({f.elasticity_min, f.elasticity_max})},
                      {"k_bounds", Json::array({f.k_min, f.k_max})},
                      {"initial_elasticity", f.initial_elasticity},
                      {"initial_k", f.initial_k},
                      {"histogram_bins", f.histogram_bins}};
  j["game"] = {{"bounds", Json::array({gm.bound_lower, gm.bound_upper})},
               {"ga_population", gm.ga_population},
               {"ga_generations", gm.ga_generations},
               {"ga_mutation_scale", gm.ga_mutation_scale},
               {"ga_tournament_size", gm.ga_tournament_size},
               {"br_tolerance", gm.br_tolerance},
               {"br_max_rounds", gm.br_max_rounds}};
  j["cascade"] = {{"triggers", c.triggers},
                  {"policy", c.policy},
                  {"max_generations", c.max_generations ? Json(*c.max_generations) : Json()},
                  {"formats", c.formats},
                  {"orientation", c.orientation}};
  j["simulate"] = {{"periods", c.simulate_periods}, {"noise", c.simulate_noise}};
  return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
  ScenarioConfig c;
  read(j, "panel", c.panel);
  read(j, "edges", c.edges);
  read(j, "gdp", c.gdp);
  read(j, "params", c.params);
  read(j, "fit", c.fit);
  read(j, "out_dir", c.out_dir);
  read(j, "seed", c.seed);
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    auto& o = c.generator;
    read(g, "firms", o.firm_count);
    if (g.contains("edge_model")) o.edge_model = parse_edge_model(g.at("edge_model"));
    read(g, "mean_degree", o.mean_out_degree);
    read(g, "max_customers", o.max_customers);
    read_range(g, "alpha", o.alpha);
    read_range(g, "beta", o.beta);
    read(g, "max_returns_to_scale", o.max_returns_to_scale);
    read_range(g, "k", o.k);
    read_range(g, "cost_coeff", o.cost_coeff);
    read(g, "interest_rate", o.interest_rate);
    read(g, "sigma", o.noise_sigma);
    read_range(g, "capital", o.capital);
    read_range(g, "equity_to_revenue", o.equity_to_revenue);
    read(g, "gdp_initial", o.gdp_initial);
    read(g, "gdp_growth", o.gdp_growth);
    read(g, "gdp_volatility", o.gdp_volatility);
    read(g, "decision_jitter", o.decision_jitter);
    read(g, "periods", o.horizon);
    read(g, "noise", o.noise);
  }
  if (j.contains("calibration")) {
    const auto& f = j.at("calibration");
    auto& o = c.calibration;
    read(f, "gradient_tolerance", o.gradient_tolerance);
    read(f, "max_iterations", o.max_iterations);
    read(f, "armijo", o.armijo);
    if (f.contains("elasticity_bounds")) {
      const auto r = range_from(f.at("elasticity_bounds"));
      o.elasticity_min = r.lo;
      o.elasticity_max = r.hi;
    }
    if (f.contains("k_bounds")) {
      const auto r = range_from(f.at("k_bounds"));
      o.k_min = r.lo;
      o.k_max = r.hi;
    }
    read(f, "initial_elasticity", o.initial_elasticity);
    read(f, "initial_k", o.initial_k);
    read(f, "histogram_bins", o.histogram_bins);
  }
  if (j.contains("game")) {
    const auto& g = j.at("game");
    auto& o = c.game;
    if (g.contains("bounds")) {
      const auto r = range_from(g.at("bounds"));
      o.bound_lower = r.lo;
      o.bound_upper = r.hi;
    }
    read(g, "ga_population", o.ga_population);
    read(g, "ga_generations", o.ga_generations);
    read(g, "ga_mutation_scale", o.ga_mutation_scale);
    read(g, "ga_tournament_size", o.ga_tournament_size);
    read(g, "br_tolerance", o.br_tolerance);
    read(g, "br_max_rounds", o.br_max_rounds);
  }
  if (j.contains("cascade")) {
    const auto& k = j.at("cascade");
    read(k, "triggers", c.triggers);
    read(k, "policy", c.policy);
    if (k.contains("max_generations") && !k.at("max_generations").is_null())
      c.max_generations = k.at("max_generations").get<std::size_t>();
    read(k, "formats", c.formats);
    read(k, "orientation", c.orientation);
  }
  if (j.contains("simulate")) {
    const auto& s = j.at("simulate");
    read(s, "periods", c.simulate_periods);
    read(s, "noise", c.simulate_noise);
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config");
  try {
    return scenario_from_json(Json::parse(in));
  } catch (const Json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace chainbk::cli
