#pragma once

// Chain bankruptcy: starting from trigger firms, suppliers of bankrupt firms
// lose the corresponding revenue growth, are re-evaluated through one
// accounting term, and fail when their end-of-term equity goes negative.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainbk/econ.hpp"
#include "chainbk/game.hpp"

namespace chainbk {

struct CascadeConfig {
  std::vector<std::string> trigger_firms;
  /// Generations including the trigger generation; defaults to firm count.
  std::optional<std::size_t> max_generations;
  BankruptRatioPolicy policy = BankruptRatioPolicy::zero_revenue;
  /// When false, evaluated firms re-solve their best response under the
  /// shocked interaction sum.
  bool freeze_decisions = true;
  double gdp_ratio = 1.0;
  double revenue_floor = kDefaultRevenueFloor;
};

enum class StopReason {
  equity_sufficient,  ///< shock produced a loss that equity absorbed
  link_too_weak,      ///< shock too small to produce a loss at all
  not_reached,        ///< exposed but never evaluated (generation cap hit)
};

std::string_view to_string(StopReason reason);
std::string_view to_string(BankruptRatioPolicy policy);

struct BankruptFirm {
  FirmIndex firm = 0;
  std::size_t generation = 0;
};

/// Most recent evaluation of a firm.
struct EquityTrace {
  FirmIndex firm = 0;
  std::size_t generation = 0;
  double equity_begin = 0.0;
  double profit = 0.0;
  double equity_end = 0.0;
  bool revenue_floored = false;
};

struct Survivor {
  FirmIndex firm = 0;
  StopReason reason = StopReason::equity_sufficient;
};

struct CascadeResult {
  std::vector<BankruptFirm> bankrupt;  ///< ordered by (generation, firm)
  std::vector<EquityTrace> equity_trace;  ///< ordered by firm
  std::vector<Survivor> survivors;     ///< ordered by firm
  std::size_t generations_run = 0;

  std::optional<std::size_t> generation_of(FirmIndex firm) const;
};

struct StepOutcome {
  std::vector<FirmIndex> newly_bankrupt;  ///< ascending
  std::vector<EquityTrace> traces;        ///< every evaluated supplier, ascending
};

/// One generation: every live supplier of a flagged firm is evaluated
/// against the flags as they stand (generation barrier). `bankrupt` holds
/// one flag per firm; `decisions` one frozen decision per firm.
StepOutcome propagate_step(const Economy& economy,
                           std::span<const InvestmentDecision> decisions,
                           std::span<const std::uint8_t> bankrupt, const CascadeConfig& config,
                           std::size_t generation = 1, const GameConfig& game = {});

/// Runs the cascade with the given frozen decisions. Throws
/// std::out_of_range for an unknown trigger id.
CascadeResult run_cascade(const Economy& economy, const CascadeConfig& config,
                          std::span<const InvestmentDecision> decisions,
                          const GameConfig& game = {});

/// Same, with decisions taken from the pre-shock Nash solution.
CascadeResult run_cascade(const Economy& economy, const CascadeConfig& config,
                          const GameConfig& game = {});

}  // namespace chainbk
