#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <unordered_map>

#include "chainbk/io.hpp"

namespace chainbk {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Line-oriented CSV reader: skips blank and '#' lines, checks the header.
class CsvReader {
 public:
  CsvReader(const fs::path& path, std::span<const std::string_view> required)
      : path_(path), in_(path) {
    if (!in_) throw FormatError(path.string() + ": cannot open file");
    if (!next_raw()) throw FormatError(path.string() + ": missing header");
    for (auto h : split(line_)) header_store_.emplace_back(h);
    if (header_store_.size() < required.size())
      fail("header must start with " + join(required));
    for (std::size_t i = 0; i < required.size(); ++i)
      if (header_store_[i] != required[i]) fail("header must start with " + join(required));
  }

  std::size_t columns() const { return header_store_.size(); }
  const std::string& column(std::size_t i) const { return header_store_[i]; }

  bool next() {
    if (!next_raw()) return false;
    fields_ = split(line_);
    if (fields_.size() != header_store_.size())
      fail("expected " + std::to_string(header_store_.size()) + " fields, got " +
           std::to_string(fields_.size()));
    return true;
  }

  std::string_view field(std::size_t i) const { return fields_[i]; }

  double number(std::size_t i) const {
    const auto f = fields_[i];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v))
      fail("invalid number '" + std::string(f) + "' in column " + header_store_[i]);
    return v;
  }

  int integer(std::size_t i) const {
    const auto f = fields_[i];
    int v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size())
      fail("invalid integer '" + std::string(f) + "' in column " + header_store_[i]);
    return v;
  }

  std::string text(std::size_t i) const {
    if (fields_[i].empty()) fail("empty " + header_store_[i]);
    return std::string(fields_[i]);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line_number() const { return line_no_; }

 private:
  static std::string join(std::span<const std::string_view> cols) {
    std::string s;
    for (auto c : cols) s += (s.empty() ? "" : ",") + std::string(c);
    return s;
  }

  bool next_raw() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      const auto t = trim(line_);
      if (t.empty() || t.front() == '#') continue;
      return true;
    }
    return false;
  }

  fs::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::vector<std::string> header_store_;
  std::vector<std::string_view> fields_;
};

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf, ptr);
}

std::vector<FirmParameters> ParameterTable::aligned_to(const TransactionNetwork& network) const {
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < firm_ids.size(); ++i) where.emplace(firm_ids[i], i);
  std::vector<FirmParameters> out;
  out.reserve(network.firm_count());
  for (const auto& id : network.firm_ids()) {
    auto it = where.find(id);
    if (it == where.end()) throw FormatError("parameters: no entry for firm '" + id + "'");
    out.push_back(params[it->second]);
  }
  return out;
}

PanelSeries load_panel(const fs::path& path) {
  static constexpr std::string_view cols[] = {"firm_id", "period", "revenue",
                                              "capital", "labor",  "equity"};
  CsvReader csv(path, cols);
  const bool has_label = csv.columns() > 6 && csv.column(6) == "label";
  if (csv.columns() > 6 && !has_label) csv.fail("unexpected column '" + csv.column(6) + "'");

  struct Row {
    double revenue, capital, labor, equity;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::map<int, Row>> rows;
  std::map<int, std::string> labels;
  while (csv.next()) {
    const auto id = csv.text(0);
    const int period = csv.integer(1);
    const Row row{csv.number(2), csv.number(3), csv.number(4), csv.number(5)};
    if (!(row.revenue > 0.0)) csv.fail("non-positive revenue for firm '" + id + "'");
    if (!(row.capital > 0.0)) csv.fail("non-positive capital for firm '" + id + "'");
    if (!(row.labor > 0.0)) csv.fail("non-positive labor for firm '" + id + "'");
    auto [it, fresh] = rows.try_emplace(id);
    if (fresh) order.push_back(id);
    if (!it->second.emplace(period, row).second)
      csv.fail("duplicate period " + std::to_string(period) + " for firm '" + id + "'");
    if (has_label) labels.try_emplace(period, std::string(csv.field(6)));
  }

  PanelSeries panel;
  if (order.empty()) return panel;
  for (const auto& [period, _] : rows[order.front()]) panel.periods.push_back(period);
  for (const auto& id : order) {
    const auto& series = rows[id];
    const bool aligned =
        series.size() == panel.periods.size() &&
        std::equal(series.begin(), series.end(), panel.periods.begin(),
                   [](const auto& kv, int p) { return kv.first == p; });
    if (!aligned)
      throw FormatError(path.string() + ": periods of firm '" + id +
                        "' do not match those of firm '" + order.front() + "'");
    FirmSeries fs_;
    for (const auto& [period, r] : series) {
      fs_.revenue.push_back(r.revenue);
      fs_.capital.push_back(r.capital);
      fs_.labor.push_back(r.labor);
      fs_.equity.push_back(r.equity);
    }
    panel.firm_ids.push_back(id);
    panel.firms.push_back(std::move(fs_));
  }
  if (has_label)
    for (int p : panel.periods) panel.labels.push_back(labels[p]);
  return panel;
}

TransactionNetwork load_edges(const fs::path& path, std::span<const std::string> known_firms) {
  static constexpr std::string_view cols[] = {"supplier_id", "customer_id", "k"};
  CsvReader csv(path, cols);
  TransactionNetwork net(std::vector<std::string>(known_firms.begin(), known_firms.end()));
  const bool closed = !known_firms.empty();
  while (csv.next()) {
    const auto supplier = csv.text(0);
    const auto customer = csv.text(1);
    const double k = csv.number(2);
    if (supplier == customer) csv.fail("self-loop on firm '" + supplier + "'");
    for (const auto* id : {&supplier, &customer}) {
      if (net.find(*id)) continue;
      if (closed) csv.fail("unknown firm '" + *id + "'");
      net.add_firm(*id);
    }
    const auto s = net.index_of(supplier);
    const auto c = net.index_of(customer);
    const auto existing = net.customers(s);
    if (std::any_of(existing.begin(), existing.end(), [&](const Link& l) { return l.firm == c; }))
      csv.fail("duplicate edge " + supplier + " -> " + customer);
    net.add_edge(s, c, k);
  }
  return net;
}

GdpTable load_gdp(const fs::path& path) {
  static constexpr std::string_view cols[] = {"period", "gdp"};
  CsvReader csv(path, cols);
  std::map<int, double> values;
  while (csv.next()) {
    const int period = csv.integer(0);
    const double g = csv.number(1);
    if (!(g > 0.0)) csv.fail("gdp must be positive");
    if (!values.emplace(period, g).second)
      csv.fail("duplicate period " + std::to_string(period));
  }
  GdpTable out;
  for (const auto& [p, g] : values) {
    out.periods.push_back(p);
    out.series.gdp.push_back(g);
  }
  return out;
}

ParameterTable load_parameters(const fs::path& path) {
  static constexpr std::string_view cols[] = {"firm_id",       "alpha", "beta", "cost_coeff",
                                              "interest_rate", "sigma"};
  CsvReader csv(path, cols);
  ParameterTable out;
  while (csv.next()) {
    auto id = csv.text(0);
    if (std::find(out.firm_ids.begin(), out.firm_ids.end(), id) != out.firm_ids.end())
      csv.fail("duplicate firm '" + id + "'");
    FirmParameters p{csv.number(1), csv.number(2), csv.number(3), csv.number(4), csv.number(5)};
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      csv.fail(e.what());
    }
    out.firm_ids.push_back(std::move(id));
    out.params.push_back(p);
  }
  return out;
}

void attach_gdp(PanelSeries& panel, const GdpTable& gdp) {
  if (gdp.periods != panel.periods)
    throw FormatError("gdp periods do not match panel periods");
  panel.gdp = gdp.series;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot write");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error(path.string() + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error(path.string() + ": cannot rename temporary file");
  }
}

void write_panel(const PanelSeries& panel, const fs::path& path) {
  std::ostringstream os;
  os << "firm_id,period,revenue,capital,labor,equity";
  const bool labelled = !panel.labels.empty();
  if (labelled) os << ",label";
  os << '\n';
  for (std::size_t f = 0; f < panel.firm_count(); ++f) {
    const auto& s = panel.firms[f];
    for (std::size_t t = 0; t < panel.horizon(); ++t) {
      os << panel.firm_ids[f] << ',' << panel.periods[t] << ',' << format_number(s.revenue[t])
         << ',' << format_number(s.capital[t]) << ',' << format_number(s.labor[t]) << ','
         << format_number(s.equity[t]);
      if (labelled) os << ',' << panel.labels[t];
      os << '\n';
    }
  }
  write_file_atomic(path, os.str());
}

void write_edges(const TransactionNetwork& network, const fs::path& path) {
  std::ostringstream os;
  os << "supplier_id,customer_id,k\n";
  for (const auto& e : network.edges())
    os << network.id(e.supplier) << ',' << network.id(e.customer) << ',' << format_number(e.k)
       << '\n';
  write_file_atomic(path, os.str());
}

void write_gdp(std::span<const int> periods, const MacroSeries& gdp, const fs::path& path) {
  if (periods.size() != gdp.size())
    throw std::invalid_argument("write_gdp: periods and values differ in length");
  std::ostringstream os;
  os << "period,gdp\n";
  for (std::size_t t = 0; t < periods.size(); ++t)
    os << periods[t] << ',' << format_number(gdp.gdp[t]) << '\n';
  write_file_atomic(path, os.str());
}

void write_parameters(std::span<const std::string> firm_ids,
                      std::span<const FirmParameters> params, const fs::path& path) {
  if (firm_ids.size() != params.size())
    throw std::invalid_argument("write_parameters: ids and params differ in length");
  std::ostringstream os;
  os << "firm_id,alpha,beta,cost_coeff,interest_rate,sigma\n";
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    os << firm_ids[i] << ',' << format_number(p.alpha) << ',' << format_number(p.beta) << ','
       << format_number(p.cost_coeff) << ',' << format_number(p.interest_rate) << ','
       << format_number(p.noise_sigma) << '\n';
  }
  write_file_atomic(path, os.str());
}

}  // namespace chainbk
