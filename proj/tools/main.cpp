// chainbk: generate synthetic economies, calibrate firm parameters, and run
// chain-bankruptcy scenarios from the command line.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "chainbk/calibration.hpp"
#include "chainbk/cascade.hpp"
#include "chainbk/io.hpp"
#include "chainbk/netgen.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace chainbk;
using namespace chainbk::cli;

namespace {

// Files written by the current command; removed again if the command fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::function<void(const fs::path&)>& writer) {
    if (!created_dir_ && !fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
    const auto path = dir_ / name;
    writer(path);
    written_.push_back(path);
  }

  void rollback() noexcept {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    written_.clear();
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool created_dir_ = false;
};

struct Inputs {
  PanelSeries panel;
  TransactionNetwork network;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw std::invalid_argument(std::string("missing required ") + flag);
}

Inputs load_inputs(const ScenarioConfig& c) {
  require(c.panel, "--panel");
  require(c.edges, "--edges");
  require(c.gdp, "--gdp");
  Inputs in;
  in.panel = load_panel(c.panel);
  attach_gdp(in.panel, load_gdp(c.gdp));
  in.panel.validate();
  in.network = load_edges(c.edges, in.panel.firm_ids);
  return in;
}

// Replaces alpha, beta, sigma and k by fitted values where the report has them.
void apply_fit(const FitReport& report, TransactionNetwork& network,
               std::vector<FirmParameters>& params) {
  std::map<std::pair<FirmIndex, FirmIndex>, std::size_t> edge_at;
  for (std::size_t e = 0; e < network.edges().size(); ++e)
    edge_at.emplace(std::pair{network.edges()[e].supplier, network.edges()[e].customer}, e);
  for (const auto& ff : report.batch.fits) {
    const FirmIndex i = network.index_of(ff.firm_id);
    params[i].alpha = ff.fit.alpha;
    params[i].beta = ff.fit.beta;
    params[i].noise_sigma = ff.fit.sigma;
    for (std::size_t c = 0; c < ff.customer_ids.size(); ++c) {
      const auto it = edge_at.find({i, network.index_of(ff.customer_ids[c])});
      if (it == edge_at.end())
        throw std::invalid_argument("fit report edge " + ff.firm_id + " -> " +
                                    ff.customer_ids[c] + " is not in the edge file");
      network.set_strength(it->second, ff.fit.k[c]);
    }
  }
}

Economy calibrated_economy(const ScenarioConfig& c, Inputs& in) {
  require(c.params, "--params");
  auto params = load_parameters(c.params).aligned_to(in.network);
  if (!c.fit.empty()) apply_fit(load_fit_report(c.fit), in.network, params);
  return economy_at_end(in.panel, in.network, params);
}

Provenance provenance(const std::string& command, const ScenarioConfig& c) {
  return {command, c.seed, to_json(c).dump()};
}

std::string manifest(const Provenance& p, Json extra) {
  Json j;
  j["kind"] = p.command;
  j["provenance"] = {{"command", p.command}, {"seed", p.seed}, {"config", Json::parse(p.config_json)}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j.dump(2) + "\n";
}

void run_generate(ScenarioConfig c, Outputs& out) {
  c.generator.seed = c.seed;
  const auto syn = generate_economy(c.generator);
  const auto& panel = syn.simulation.panel;
  out.write("panel.csv", [&](const fs::path& p) { write_panel(panel, p); });
  out.write("edges.csv", [&](const fs::path& p) { write_edges(syn.economy.network, p); });
  out.write("gdp.csv", [&](const fs::path& p) { write_gdp(panel.periods, panel.gdp, p); });
  out.write("params.csv", [&](const fs::path& p) {
    write_parameters(syn.economy.network.firm_ids(), syn.economy.params, p);
  });
  Json events = Json::array();
  for (const auto& e : syn.simulation.floor_events)
    events.push_back({{"firm", e.firm_id}, {"period", e.period}});
  const auto text = manifest(provenance("generate", c),
                             {{"firms", syn.economy.size()},
                              {"edges", syn.economy.network.edge_count()},
                              {"revenue_floor_events", events}});
  out.write("generate.json", [&](const fs::path& p) { write_file_atomic(p, text); });
  std::cout << "generated " << syn.economy.size() << " firms, "
            << syn.economy.network.edge_count() << " edges, " << panel.horizon()
            << " periods in " << c.out_dir << "\n";
}

void run_calibrate(const ScenarioConfig& c, Outputs& out) {
  const auto in = load_inputs(c);
  const auto batch = fit_all(in.panel, in.network, c.calibration);
  out.write("fit_report.json", [&](const fs::path& p) {
    export_fit_report(batch, provenance("calibrate", c), p);
  });
  std::size_t converged = 0;
  double worst = 0.0;
  for (const auto& f : batch.fits) {
    converged += f.fit.converged ? 1 : 0;
    worst = std::max(worst, f.fit.average_error);
  }
  std::cout << "fitted " << batch.fits.size() << " firms (" << converged << " converged, "
            << batch.failures.size() << " failed); max average error " << worst << "\n";
  for (const auto& [id, why] : batch.failures) std::cerr << "  " << id << ": " << why << "\n";
}

void run_cascade_cmd(const ScenarioConfig& c, Outputs& out) {
  if (c.triggers.empty()) throw std::invalid_argument("missing required --trigger");
  auto in = load_inputs(c);
  const auto economy = calibrated_economy(c, in);

  CascadeConfig cc;
  cc.trigger_firms = c.triggers;
  cc.max_generations = c.max_generations;
  cc.policy = parse_policy(c.policy);
  cc.gdp_ratio = in.panel.gdp.ratio(in.panel.horizon() - 1);

  GameConfig game = c.game;
  game.rng_seed = c.seed;
  const auto result = run_cascade(economy, cc, game);

  EdgeOrientation orientation = EdgeOrientation::money_flow;
  if (c.orientation == "physical") orientation = EdgeOrientation::physical;
  else if (c.orientation != "money-flow")
    throw std::invalid_argument("unknown orientation '" + c.orientation + "'");

  const auto prov = provenance("cascade", c);
  for (const auto& fmt : c.formats) {
    if (fmt == "json")
      out.write("cascade.json", [&](const fs::path& p) {
        export_cascade(result, economy.network, cc, prov, p);
      });
    else if (fmt == "dot")
      out.write("cascade.dot", [&](const fs::path& p) {
        export_network_dot(economy.network, &result, p, orientation);
      });
    else if (fmt == "graphml")
      out.write("cascade.graphml", [&](const fs::path& p) {
        export_network_graphml(economy.network, &result, p, orientation);
      });
    else
      throw std::invalid_argument("unknown format '" + fmt + "'");
  }
  std::cout << "bankrupt firms: " << result.bankrupt.size() << " over "
            << result.generations_run << " generation(s)\n";
  for (const auto& b : result.bankrupt)
    std::cout << "  " << economy.network.id(b.firm) << "  generation " << b.generation << "\n";
}

void run_simulate(const ScenarioConfig& c, Outputs& out) {
  auto in = load_inputs(c);
  const auto economy = calibrated_economy(c, in);
  const std::size_t horizon = c.simulate_periods;
  const auto gdp = generate_gdp(horizon, c.generator.gdp_growth, c.generator.gdp_volatility,
                                c.seed, in.panel.gdp.gdp.back());
  SimulationOptions opt;
  opt.horizon = horizon;
  opt.seed = c.seed;
  opt.noise = c.simulate_noise;
  opt.decision_jitter = c.generator.decision_jitter;
  opt.game = c.game;
  opt.game.rng_seed = c.seed;
  for (std::size_t t = 0; t < horizon; ++t)
    opt.periods.push_back(in.panel.periods.back() + static_cast<int>(t));
  const auto sim = forward_simulate(economy, gdp, opt);

  out.write("simulated_panel.csv", [&](const fs::path& p) { write_panel(sim.panel, p); });
  out.write("simulated_gdp.csv",
            [&](const fs::path& p) { write_gdp(sim.panel.periods, sim.panel.gdp, p); });
  Json events = Json::array();
  for (const auto& e : sim.floor_events)
    events.push_back({{"firm", e.firm_id}, {"period", e.period}});
  const auto text = manifest(provenance("simulate", c), {{"revenue_floor_events", events}});
  out.write("simulate.json", [&](const fs::path& p) { write_file_atomic(p, text); });
  std::cout << "simulated " << economy.size() << " firms over " << horizon << " periods\n";
}

void print_histogram(const char* name, const Histogram& h) {
  std::cout << name << "  [" << h.lower << ", " << h.upper << "]\n";
  const std::size_t peak = h.counts.empty() ? 0 : *std::max_element(h.counts.begin(), h.counts.end());
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double lo = h.lower + h.bin_width() * static_cast<double>(b);
    const std::size_t bar = peak == 0 ? 0 : (h.counts[b] * 40 + peak - 1) / peak;
    std::cout << "  " << lo << "\t" << h.counts[b] << "\t" << std::string(bar, '#') << "\n";
  }
}

void run_report(const ScenarioConfig& c, Outputs& out) {
  require(c.fit, "--fit");
  const auto report = load_fit_report(c.fit, c.calibration.histogram_bins);
  const auto& h = report.batch.histograms;
  const auto text = manifest(provenance("report", c),
                             {{"source", report.provenance.command},
                              {"histograms", Json::parse(histograms_json(h))}});
  out.write("histograms.json", [&](const fs::path& p) { write_file_atomic(p, text); });
  print_histogram("alpha", h.alpha);
  print_histogram("beta", h.beta);
  print_histogram("alpha+beta", h.alpha_plus_beta);
  print_histogram("k", h.k);
  print_histogram("average error", h.average_error);
}

// Flag values parsed by CLI11, applied on top of the --config file.
struct Flags {
  std::string config;
  std::string panel, edges, gdp, params, fit, out_dir;
  std::uint64_t seed = 1;
  std::size_t firms = 0, periods = 0, max_customers = 0, max_generations = 0;
  std::string edge_model, noise, policy, orientation;
  double mean_degree = 0.0;
  std::vector<double> k_range, equity_range;
  std::vector<std::string> triggers, formats;
};

class Overrides {
 public:
  void add(CLI::Option* opt, std::function<void(ScenarioConfig&)> apply) {
    items_.emplace_back(opt, std::move(apply));
  }
  void apply(ScenarioConfig& c) const {
    for (const auto& [opt, f] : items_)
      if (opt->count() > 0) f(c);
  }

 private:
  std::vector<std::pair<CLI::Option*, std::function<void(ScenarioConfig&)>>> items_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chainbk: chain bankruptcy simulation and calibration"};
  app.require_subcommand(1);
  Flags f;

  auto* generate = app.add_subcommand("generate", "write a synthetic panel, edges, gdp and params");
  auto* calibrate = app.add_subcommand("calibrate", "fit alpha, beta, k, sigma per firm");
  auto* cascade = app.add_subcommand("cascade", "run chain bankruptcy from trigger firms");
  auto* simulate = app.add_subcommand("simulate", "forward-simulate a calibrated economy");
  auto* report = app.add_subcommand("report", "rebuild histograms from a fit report");

  std::map<CLI::App*, Overrides> overrides;
  auto common = [&](CLI::App* cmd) {
    auto& o = overrides[cmd];
    cmd->add_option("--config", f.config, "scenario JSON; flags override it");
    o.add(cmd->add_option("--seed", f.seed, "random seed"), [&](auto& c) { c.seed = f.seed; });
    o.add(cmd->add_option("--out-dir", f.out_dir, "output directory"),
          [&](auto& c) { c.out_dir = f.out_dir; });
  };
  auto inputs = [&](CLI::App* cmd, bool params) {
    auto& o = overrides[cmd];
    o.add(cmd->add_option("--panel", f.panel, "panel CSV"), [&](auto& c) { c.panel = f.panel; });
    o.add(cmd->add_option("--edges", f.edges, "edges CSV"), [&](auto& c) { c.edges = f.edges; });
    o.add(cmd->add_option("--gdp", f.gdp, "GDP CSV"), [&](auto& c) { c.gdp = f.gdp; });
    if (params) {
      o.add(cmd->add_option("--params", f.params, "firm parameter CSV"),
            [&](auto& c) { c.params = f.params; });
      o.add(cmd->add_option("--fit", f.fit, "fit report overriding alpha, beta, k"),
            [&](auto& c) { c.fit = f.fit; });
    }
  };
  for (auto* cmd : {generate, calibrate, cascade, simulate, report}) common(cmd);
  inputs(calibrate, false);
  inputs(cascade, true);
  inputs(simulate, true);

  {
    auto& o = overrides[generate];
    o.add(generate->add_option("--firms", f.firms, "number of firms"),
          [&](auto& c) { c.generator.firm_count = f.firms; });
    o.add(generate->add_option("--periods", f.periods, "panel length T"),
          [&](auto& c) { c.generator.horizon = f.periods; });
    o.add(generate->add_option("--edge-model", f.edge_model, "random | scale-free | chain")
              ->check(CLI::IsMember({"random", "scale-free", "chain"})),
          [&](auto& c) { c.generator.edge_model = parse_edge_model(f.edge_model); });
    o.add(generate->add_option("--mean-degree", f.mean_degree, "mean customers per firm"),
          [&](auto& c) { c.generator.mean_out_degree = f.mean_degree; });
    o.add(generate->add_option("--max-customers", f.max_customers, "cap on customers per firm"),
          [&](auto& c) { c.generator.max_customers = f.max_customers; });
    o.add(generate->add_option("--noise", f.noise, "revenue noise on|off")
              ->check(CLI::IsMember({"on", "off"})),
          [&](auto& c) { c.generator.noise = f.noise == "on"; });
    o.add(generate->add_option("--k-range", f.k_range, "k range: lo hi")->expected(2),
          [&](auto& c) { c.generator.k = {f.k_range[0], f.k_range[1]}; });
    o.add(generate->add_option("--equity-range", f.equity_range,
                               "initial equity / revenue range: lo hi")
              ->expected(2),
          [&](auto& c) { c.generator.equity_to_revenue = {f.equity_range[0], f.equity_range[1]}; });
  }
  {
    auto& o = overrides[cascade];
    o.add(cascade->add_option("--trigger", f.triggers, "trigger firm id (repeatable)"),
          [&](auto& c) { c.triggers = f.triggers; });
    o.add(cascade->add_option("--policy", f.policy, "zero-revenue | pure-loss")
              ->check(CLI::IsMember({"zero-revenue", "pure-loss"})),
          [&](auto& c) { c.policy = f.policy; });
    o.add(cascade->add_option("--max-generations", f.max_generations, "generation cap")
              ->check(CLI::PositiveNumber),
          [&](auto& c) { c.max_generations = f.max_generations; });
    o.add(cascade->add_option("--format", f.formats, "dot | graphml | json (repeatable)")
              ->check(CLI::IsMember({"dot", "graphml", "json"})),
          [&](auto& c) { c.formats = f.formats; });
    o.add(cascade->add_option("--orientation", f.orientation, "money-flow | physical")
              ->check(CLI::IsMember({"money-flow", "physical"})),
          [&](auto& c) { c.orientation = f.orientation; });
  }
  {
    auto& o = overrides[simulate];
    o.add(simulate->add_option("--periods", f.periods, "periods to simulate"),
          [&](auto& c) { c.simulate_periods = f.periods; });
    o.add(simulate->add_option("--noise", f.noise, "revenue noise on|off")
              ->check(CLI::IsMember({"on", "off"})),
          [&](auto& c) { c.simulate_noise = f.noise == "on"; });
  }
  overrides[report].add(report->add_option("--fit", f.fit, "fit report JSON"),
                        [&](auto& c) { c.fit = f.fit; });

  CLI11_PARSE(app, argc, argv);

  CLI::App* cmd = app.get_subcommands().front();
  ScenarioConfig config;
  std::optional<Outputs> out;
  try {
    if (!f.config.empty()) config = load_scenario(f.config);
    overrides[cmd].apply(config);
    out.emplace(config.out_dir);
    if (cmd == generate) run_generate(config, *out);
    else if (cmd == calibrate) run_calibrate(config, *out);
    else if (cmd == cascade) run_cascade_cmd(config, *out);
    else if (cmd == simulate) run_simulate(config, *out);
    else run_report(config, *out);
  } catch (const std::exception& e) {
    if (out) out->rollback();
    std::cerr << "chainbk " << cmd->get_name() << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
