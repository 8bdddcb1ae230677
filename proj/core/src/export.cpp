#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "chainbk/io.hpp"

namespace chainbk {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json provenance_json(const Provenance& p) {
  Json config = Json::object();
  if (!p.config_json.empty()) config = Json::parse(p.config_json);
  return Json{{"command", p.command}, {"seed", p.seed}, {"config", std::move(config)}};
}

Json histogram_json(const Histogram& h) {
  return Json{{"lower", h.lower}, {"upper", h.upper}, {"bin_width", h.bin_width()},
              {"counts", h.counts}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::optional<std::size_t>> generations(const TransactionNetwork& network,
                                                    const CascadeResult* result) {
  std::vector<std::optional<std::size_t>> gen(network.firm_count());
  if (result)
    for (const auto& b : result->bankrupt) gen.at(b.firm) = b.generation;
  return gen;
}

std::pair<FirmIndex, FirmIndex> oriented(const Edge& e, EdgeOrientation o) {
  return o == EdgeOrientation::money_flow ? std::pair{e.customer, e.supplier}
                                          : std::pair{e.supplier, e.customer};
}

std::string_view orientation_name(EdgeOrientation o) {
  return o == EdgeOrientation::money_flow ? "money-flow" : "physical";
}

}  // namespace

std::string cascade_json(const CascadeResult& result, const TransactionNetwork& network,
                         const CascadeConfig& config, const Provenance& provenance) {
  Json j;
  j["kind"] = "cascade";
  j["provenance"] = provenance_json(provenance);
  j["triggers"] = config.trigger_firms;
  j["policy"] = to_string(config.policy);
  j["gdp_ratio"] = config.gdp_ratio;
  j["freeze_decisions"] = config.freeze_decisions;
  j["max_generations"] = config.max_generations.value_or(network.firm_count());
  j["generations_run"] = result.generations_run;
  Json bankrupt = Json::array();
  for (const auto& b : result.bankrupt)
    bankrupt.push_back({{"firm", network.id(b.firm)}, {"generation", b.generation}});
  j["bankrupt"] = std::move(bankrupt);
  Json traces = Json::array();
  for (const auto& t : result.equity_trace)
    traces.push_back({{"firm", network.id(t.firm)},
                      {"generation", t.generation},
                      {"equity_begin", t.equity_begin},
                      {"profit", t.profit},
                      {"equity_end", t.equity_end},
                      {"revenue_floored", t.revenue_floored}});
  j["equity_trace"] = std::move(traces);
  Json survivors = Json::array();
  for (const auto& s : result.survivors)
    survivors.push_back({{"firm", network.id(s.firm)}, {"reason", to_string(s.reason)}});
  j["survivors"] = std::move(survivors);
  return dump(j);
}

void export_cascade(const CascadeResult& result, const TransactionNetwork& network,
                    const CascadeConfig& config, const Provenance& provenance,
                    const fs::path& path) {
  write_file_atomic(path, cascade_json(result, network, config, provenance));
}

std::string histograms_json(const FitHistograms& h) {
  const Json j{{"alpha", histogram_json(h.alpha)},
               {"beta", histogram_json(h.beta)},
               {"alpha_plus_beta", histogram_json(h.alpha_plus_beta)},
               {"k", histogram_json(h.k)},
               {"average_error", histogram_json(h.average_error)}};
  return dump(j);
}

std::string fit_report_json(const BatchFit& batch, const Provenance& provenance) {
  Json j;
  j["kind"] = "fit_report";
  j["provenance"] = provenance_json(provenance);
  Json firms = Json::array();
  for (const auto& f : batch.fits) {
    Json customers = Json::array();
    for (std::size_t i = 0; i < f.customer_ids.size(); ++i)
      customers.push_back({{"customer", f.customer_ids[i]}, {"k", f.fit.k[i]}});
    firms.push_back({{"firm", f.firm_id},
                     {"alpha", f.fit.alpha},
                     {"beta", f.fit.beta},
                     {"sigma", f.fit.sigma},
                     {"sse", f.fit.sse},
                     {"average_error", f.fit.average_error},
                     {"iterations", f.fit.iterations},
                     {"converged", f.fit.converged},
                     {"degenerate", f.fit.degenerate},
                     {"customers", std::move(customers)},
                     {"objective_history", f.fit.objective_history}});
  }
  j["firms"] = std::move(firms);
  Json failures = Json::array();
  for (const auto& [id, why] : batch.failures) failures.push_back({{"firm", id}, {"reason", why}});
  j["failures"] = std::move(failures);
  j["histograms"] = Json::parse(histograms_json(batch.histograms));
  return dump(j);
}

void export_fit_report(const BatchFit& batch, const Provenance& provenance,
                       const fs::path& path) {
  write_file_atomic(path, fit_report_json(batch, provenance));
}

FitReport load_fit_report(const fs::path& path, std::size_t bins) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    if (j.at("kind") != "fit_report") throw FormatError(path.string() + ": not a fit report");
    FitReport out;
    const auto& p = j.at("provenance");
    out.provenance = {p.at("command").get<std::string>(), p.at("seed").get<std::uint64_t>(),
                      p.at("config").dump()};
    for (const auto& f : j.at("firms")) {
      FirmFit ff;
      ff.firm_id = f.at("firm").get<std::string>();
      ff.fit.alpha = f.at("alpha").get<double>();
      ff.fit.beta = f.at("beta").get<double>();
      ff.fit.sigma = f.at("sigma").get<double>();
      ff.fit.sse = f.at("sse").get<double>();
      ff.fit.average_error = f.at("average_error").get<double>();
      ff.fit.iterations = f.at("iterations").get<std::size_t>();
      ff.fit.converged = f.at("converged").get<bool>();
      ff.fit.degenerate = f.at("degenerate").get<bool>();
      for (const auto& c : f.at("customers")) {
        ff.customer_ids.push_back(c.at("customer").get<std::string>());
        ff.fit.k.push_back(c.at("k").get<double>());
      }
      ff.fit.objective_history = f.at("objective_history").get<std::vector<double>>();
      out.batch.fits.push_back(std::move(ff));
    }
    for (const auto& f : j.at("failures"))
      out.batch.failures.emplace(f.at("firm").get<std::string>(),
                                 f.at("reason").get<std::string>());
    out.batch.histograms = summarize(out.batch.fits, bins);
    return out;
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string render_dot(const TransactionNetwork& network, const CascadeResult* result,
                       EdgeOrientation orientation) {
  const auto gen = generations(network, result);
  std::ostringstream os;
  os << "digraph transactions {\n";
  os << "  orientation_of_edges=" << dot_quote(std::string(orientation_name(orientation)))
     << ";\n";
  for (FirmIndex i = 0; i < network.firm_count(); ++i) {
    os << "  " << dot_quote(network.id(i));
    if (!result) {
      os << ";\n";
      continue;
    }
    if (gen[i])
      os << " [bankrupt=true, generation=" << *gen[i]
         << ", shape=triangle, style=filled, fillcolor=white];\n";
    else
      os << " [bankrupt=false, shape=circle];\n";
  }
  for (const auto& e : network.edges()) {
    const auto [from, to] = oriented(e, orientation);
    os << "  " << dot_quote(network.id(from)) << " -> " << dot_quote(network.id(to))
       << " [k=" << short_number(e.k) << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string render_graphml(const TransactionNetwork& network, const CascadeResult* result,
                           EdgeOrientation orientation) {
  const auto gen = generations(network, result);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
     << "  <key id=\"bankrupt\" for=\"node\" attr.name=\"bankrupt\" attr.type=\"boolean\"/>\n"
     << "  <key id=\"generation\" for=\"node\" attr.name=\"generation\" attr.type=\"int\"/>\n"
     << "  <key id=\"k\" for=\"edge\" attr.name=\"k\" attr.type=\"double\"/>\n"
     << "  <graph id=\"transactions\" edgedefault=\"directed\" orientation=\""
     << orientation_name(orientation) << "\">\n";
  for (FirmIndex i = 0; i < network.firm_count(); ++i) {
    os << "    <node id=\"" << xml_escape(network.id(i)) << "\"";
    if (!result) {
      os << "/>\n";
      continue;
    }
    os << "><data key=\"bankrupt\">" << (gen[i] ? "true" : "false") << "</data>";
    if (gen[i]) os << "<data key=\"generation\">" << *gen[i] << "</data>";
    os << "</node>\n";
  }
  for (const auto& e : network.edges()) {
    const auto [from, to] = oriented(e, orientation);
    os << "    <edge source=\"" << xml_escape(network.id(from)) << "\" target=\""
       << xml_escape(network.id(to)) << "\"><data key=\"k\">" << short_number(e.k)
       << "</data></edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
  return os.str();
}

void export_network_dot(const TransactionNetwork& network, const CascadeResult* result,
                        const fs::path& path, EdgeOrientation orientation) {
  write_file_atomic(path, render_dot(network, result, orientation));
}

void export_network_graphml(const TransactionNetwork& network, const CascadeResult* result,
                            const fs::path& path, EdgeOrientation orientation) {
  write_file_atomic(path, render_graphml(network, result, orientation));
}

}  // namespace chainbk
