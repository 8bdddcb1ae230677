#include "chainbk/panel.hpp"

#include <cmath>
#include <stdexcept>

namespace chainbk {

std::optional<std::size_t> PanelSeries::find(std::string_view id) const {
  for (std::size_t i = 0; i < firm_ids.size(); ++i)
    if (firm_ids[i] == id) return i;
  return std::nullopt;
}

void PanelSeries::validate() const {
  const std::size_t n = periods.size();
  if (firm_ids.size() != firms.size())
    throw std::invalid_argument("panel: firm id count does not match series count");
  if (!labels.empty() && labels.size() != n)
    throw std::invalid_argument("panel: label count does not match period count");
  if (!gdp.empty() && gdp.size() != n)
    throw std::invalid_argument("panel: gdp series has " + std::to_string(gdp.size()) +
                                " periods, expected " + std::to_string(n));
  gdp.validate();
  for (std::size_t f = 0; f < firms.size(); ++f) {
    const auto& s = firms[f];
    if (s.revenue.size() != n || s.capital.size() != n || s.labor.size() != n ||
        s.equity.size() != n)
      throw std::invalid_argument("panel: firm '" + firm_ids[f] + "' is misaligned");
    for (std::size_t t = 0; t < n; ++t) {
      if (!(s.revenue[t] > 0.0) || !(s.capital[t] > 0.0) || !(s.labor[t] > 0.0) ||
          !std::isfinite(s.revenue[t]) || !std::isfinite(s.capital[t]) ||
          !std::isfinite(s.labor[t]) || !std::isfinite(s.equity[t]))
        throw std::invalid_argument("panel: firm '" + firm_ids[f] +
                                    "' has a non-positive value in period " +
                                    std::to_string(periods[t]));
    }
  }
}

FirmState PanelSeries::state_at(std::size_t f, std::size_t t) const {
  const auto& s = firms.at(f);
  if (t == 0 || t >= horizon()) throw std::out_of_range("panel: state index out of range");
  return {s.revenue[t], s.revenue[t - 1], s.capital[t], s.labor[t], s.equity[t], false};
}

}  // namespace chainbk
