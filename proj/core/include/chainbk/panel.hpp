#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainbk/econ.hpp"

namespace chainbk {

/// Time series of one firm, aligned with PanelSeries::periods.
struct FirmSeries {
  std::vector<double> revenue;
  std::vector<double> capital;
  std::vector<double> labor;
  std::vector<double> equity;  ///< equity carried into the next term
};

/// Observed or simulated financial panel. All series share the period axis;
/// `gdp` is either empty or aligned with it as well.
struct PanelSeries {
  std::vector<int> periods;
  std::vector<std::string> labels;  ///< optional, empty or one per period
  std::vector<std::string> firm_ids;
  std::vector<FirmSeries> firms;
  MacroSeries gdp;

  std::size_t horizon() const noexcept { return periods.size(); }
  std::size_t firm_count() const noexcept { return firms.size(); }
  std::optional<std::size_t> find(std::string_view id) const;

  /// Throws std::invalid_argument naming the offending firm when series are
  /// misaligned or not strictly positive (equity may take any sign).
  void validate() const;

  /// State of firm f at period index t (t >= 1 so that R(t-1) exists).
  FirmState state_at(std::size_t f, std::size_t t) const;
};

}  // namespace chainbk
