#pragma once

// File formats. CSV inputs:
//   panel:  firm_id,period,revenue,capital,labor,equity[,label]
//   edges:  supplier_id,customer_id,k
//   gdp:    period,gdp
//   params: firm_id,alpha,beta,cost_coeff,interest_rate,sigma
// Results are JSON; networks export to DOT and GraphML.

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbk/calibration.hpp"
#include "chainbk/cascade.hpp"
#include "chainbk/econ.hpp"
#include "chainbk/network.hpp"
#include "chainbk/panel.hpp"

namespace chainbk {

/// Input rejected by a loader; the message carries file and line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GdpTable {
  std::vector<int> periods;
  MacroSeries series;
};

struct ParameterTable {
  std::vector<std::string> firm_ids;
  std::vector<FirmParameters> params;

  /// Parameters in network order; throws if a firm is missing.
  std::vector<FirmParameters> aligned_to(const TransactionNetwork& network) const;
};

PanelSeries load_panel(const std::filesystem::path& path);

/// With `known_firms` empty the network holds the firms named in the file;
/// otherwise it holds exactly `known_firms` and any other id is an error.
TransactionNetwork load_edges(const std::filesystem::path& path,
                              std::span<const std::string> known_firms = {});

GdpTable load_gdp(const std::filesystem::path& path);

ParameterTable load_parameters(const std::filesystem::path& path);

/// Sets panel.gdp; the GDP periods must match the panel periods.
void attach_gdp(PanelSeries& panel, const GdpTable& gdp);

void write_panel(const PanelSeries& panel, const std::filesystem::path& path);
void write_edges(const TransactionNetwork& network, const std::filesystem::path& path);
void write_gdp(std::span<const int> periods, const MacroSeries& gdp,
               const std::filesystem::path& path);
void write_parameters(std::span<const std::string> firm_ids,
                      std::span<const FirmParameters> params,
                      const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// What produced an output: embedded verbatim so a run can be repeated.
struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_json = "{}";  ///< a JSON object
};

std::string cascade_json(const CascadeResult& result, const TransactionNetwork& network,
                         const CascadeConfig& config, const Provenance& provenance);
void export_cascade(const CascadeResult& result, const TransactionNetwork& network,
                    const CascadeConfig& config, const Provenance& provenance,
                    const std::filesystem::path& path);

std::string fit_report_json(const BatchFit& batch, const Provenance& provenance);
void export_fit_report(const BatchFit& batch, const Provenance& provenance,
                       const std::filesystem::path& path);

struct FitReport {
  Provenance provenance;
  BatchFit batch;
};

/// Reads a report written by export_fit_report; histograms are rebuilt with
/// `bins` bins.
FitReport load_fit_report(const std::filesystem::path& path, std::size_t bins = 20);

std::string histograms_json(const FitHistograms& histograms);

enum class EdgeOrientation {
  money_flow,  ///< customer -> supplier
  physical,    ///< supplier -> customer
};

/// `result` may be null for a plain topology export.
std::string render_dot(const TransactionNetwork& network, const CascadeResult* result,
                       EdgeOrientation orientation = EdgeOrientation::money_flow);
std::string render_graphml(const TransactionNetwork& network, const CascadeResult* result,
                           EdgeOrientation orientation = EdgeOrientation::money_flow);

void export_network_dot(const TransactionNetwork& network, const CascadeResult* result,
                        const std::filesystem::path& path,
                        EdgeOrientation orientation = EdgeOrientation::money_flow);
void export_network_graphml(const TransactionNetwork& network, const CascadeResult* result,
                            const std::filesystem::path& path,
                            EdgeOrientation orientation = EdgeOrientation::money_flow);

}  // namespace chainbk
