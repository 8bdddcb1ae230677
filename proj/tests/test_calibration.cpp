#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "chainbk/calibration.hpp"
#include "chainbk/netgen.hpp"
#include "support.hpp"

using namespace chainbk;
using doctest::Approx;

namespace {

// Small noiseless economy; every firm has at most two customers.
SyntheticEconomy noiseless(std::uint64_t seed, std::size_t firms = 12) {
  GeneratorConfig cfg;
  cfg.firm_count = firms;
  cfg.mean_out_degree = 1.5;
  cfg.max_customers = 2;
  cfg.noise = false;
  cfg.seed = seed;
  return generate_economy(cfg);
}

// Independent evaluation of sum eps^2 and its gradient straight from the
// series, for a firm with customers cs.
struct Direct {
  const FirmSeries& f;
  std::vector<const FirmSeries*> cs;
  const MacroSeries& gdp;

  double eps(std::size_t t, std::span<const double> x, std::vector<double>* d) const {
    const double kr = f.capital[t + 1] / f.capital[t], lr = f.labor[t + 1] / f.labor[t];
    const double prod = std::pow(kr, x[0]) * std::pow(lr, x[1]);
    double e = f.revenue[t + 1] / f.revenue[t] - prod;
    if (d) *d = {-prod * std::log(kr), -prod * std::log(lr)};
    const double g = gdp.gdp[t] / gdp.gdp[t - 1];
    for (std::size_t j = 0; j < cs.size(); ++j) {
      const double demand = cs[j]->revenue[t] / cs[j]->revenue[t - 1] - g;
      e -= x[2 + j] * demand;
      if (d) d->push_back(-demand);
    }
    return e;
  }

  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g(x.size(), 0.0), d;
    for (std::size_t t = 1; t + 1 < f.revenue.size(); ++t) {
      const double e = eps(t, x, &d);
      for (std::size_t i = 0; i < x.size(); ++i) g[i] += 2.0 * e * d[i];
    }
    return g;
  }
};

FirmSeries constant_series(std::size_t T) {
  FirmSeries s;
  s.revenue.assign(T, 100.0);
  s.capital.assign(T, 50.0);
  s.labor.assign(T, 20.0);
  s.equity.assign(T, 10.0);
  return s;
}

}  // namespace

TEST_CASE("residual on model-generated data") {
  const auto syn = noiseless(3);
  const auto& panel = syn.simulation.panel;
  const auto& net = syn.economy.network;
  for (FirmIndex i = 0; i < net.firm_count(); ++i) {
    const auto cs = test::customer_series(panel, net, i);
    std::vector<double> k;
    for (const auto& c : net.customers(i)) k.push_back(c.k);
    const auto& p = syn.economy.params[i];
    for (std::size_t t = 1; t + 1 < panel.horizon(); ++t) {
      CHECK(std::abs(residual(panel.firms[i], cs, panel.gdp, t, p.alpha, p.beta, k)) < 1e-12);
      CHECK(std::abs(residual(panel.firms[i], cs, panel.gdp, t, p.alpha + 0.1, p.beta, k)) >
            1e-6);
    }
    CHECK_THROWS_AS(residual(panel.firms[i], cs, panel.gdp, 0, p.alpha, p.beta, k),
                    std::out_of_range);
    CHECK_THROWS_AS(
        residual(panel.firms[i], cs, panel.gdp, panel.horizon() - 1, p.alpha, p.beta, k),
        std::out_of_range);
  }
}

TEST_CASE("residual without customers is the growth mismatch") {
  FirmSeries f;
  f.revenue = {100, 110, 121, 125};
  f.capital = {10, 20, 20, 40};
  f.labor = {5, 5, 10, 10};
  f.equity = {0, 0, 0, 0};
  const MacroSeries g{{1, 2, 3, 4}};
  const std::vector<const FirmSeries*> none;
  CHECK(residual(f, none, g, 1, 0.5, 0.25, {}) == Approx(1.1 - std::pow(2.0, 0.25)));
  CHECK(residual(f, none, g, 2, 0.5, 0.25, {}) ==
        Approx(125.0 / 121.0 - std::pow(2.0, 0.5)));
}

TEST_CASE("negative log-likelihood core") {
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(neg_log_likelihood_core(zero, 0.3) == 0.0);
  const std::vector<double> r{0.1, -0.1};
  CHECK(neg_log_likelihood_core(r, 0.1) == Approx(1.0));
  CHECK(neg_log_likelihood_core(r, 0.2) == Approx(neg_log_likelihood_core(r, 0.1) / 4.0));
  CHECK_THROWS_AS(neg_log_likelihood_core(r, 0.0), std::domain_error);
  CHECK_THROWS_AS(neg_log_likelihood_core(r, -1.0), std::domain_error);
}

TEST_CASE("average error") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(average_error(zero) == 0.0);
  const std::vector<double> r{0.03, -0.03};
  CHECK(average_error(r) == Approx(0.03));
}

TEST_CASE("numerical gradient matches the analytic gradient") {
  const auto syn = noiseless(5);
  const auto& panel = syn.simulation.panel;
  const auto& net = syn.economy.network;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> e(0.05, 1.0), kk(-1.0, 1.0);
  int checked = 0;
  for (FirmIndex i = 0; i < net.firm_count() && checked < 10; ++i) {
    const auto cs = test::customer_series(panel, net, i);
    const FitProblem problem(panel.firms[i], cs, panel.gdp);
    const Direct direct{panel.firms[i], cs, panel.gdp};
    std::vector<double> x{e(rng), e(rng)};
    for (std::size_t j = 0; j < cs.size(); ++j) x.push_back(kk(rng));
    auto f = [&](std::span<const double> v) { return problem.sum_squares(v); };
    const auto fine = numerical_gradient(f, x);
    const auto coarse = numerical_gradient(f, x, 1e-4);
    const auto exact = direct.gradient(x);
    const double scale = std::max(1.0, std::sqrt(std::inner_product(
                                           exact.begin(), exact.end(), exact.begin(), 0.0)));
    for (std::size_t j = 0; j < x.size(); ++j) {
      CHECK(std::abs(fine[j] - exact[j]) / scale < 1e-5);
      CHECK(std::abs(fine[j] - coarse[j]) / scale < 1e-5);
    }
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("fit recovers noiseless parameters") {
  const auto syn = noiseless(7, 20);
  const auto& panel = syn.simulation.panel;
  const auto& net = syn.economy.network;
  for (FirmIndex i = 0; i < net.firm_count(); ++i) {
    const auto cs = test::customer_series(panel, net, i);
    const auto fit = fit_firm(panel.firms[i], cs, panel.gdp);
    const auto& p = syn.economy.params[i];
    CHECK(fit.converged);
    CHECK(std::abs(fit.alpha - p.alpha) < 1e-4);
    CHECK(std::abs(fit.beta - p.beta) < 1e-4);
    const auto customers = net.customers(i);
    for (std::size_t j = 0; j < customers.size(); ++j)
      CHECK(std::abs(fit.k[j] - customers[j].k) < 1e-4);
    CHECK(fit.sigma < 1e-6);
    CHECK(fit.sse < 1e-10);
    CHECK_FALSE(fit.degenerate);
  }
}

TEST_CASE("objective never increases and sigma is the RMS residual") {
  GeneratorConfig cfg;
  cfg.firm_count = 10;
  cfg.mean_out_degree = 1.5;
  cfg.max_customers = 2;
  cfg.seed = 11;
  const auto syn = generate_economy(cfg);
  const auto& panel = syn.simulation.panel;
  const auto& net = syn.economy.network;
  for (FirmIndex i = 0; i < net.firm_count(); ++i) {
    const auto cs = test::customer_series(panel, net, i);
    const FitProblem problem(panel.firms[i], cs, panel.gdp);
    const auto fit = fit_problem(problem);
    for (std::size_t n = 1; n < fit.objective_history.size(); ++n)
      CHECK(fit.objective_history[n] <= fit.objective_history[n - 1]);
    std::vector<double> x{fit.alpha, fit.beta};
    x.insert(x.end(), fit.k.begin(), fit.k.end());
    const auto eps = problem.residuals(x);
    double ms = 0.0;
    for (double v : eps) ms += v * v;
    ms /= static_cast<double>(eps.size());
    CHECK(fit.sigma * fit.sigma == Approx(ms).epsilon(1e-12));
    CHECK(fit.average_error == Approx(fit.sigma).epsilon(1e-12));
    CHECK(fit.sse >= 0.0);
  }
}

TEST_CASE("constant panel is degenerate") {
  const auto f = constant_series(8);
  const MacroSeries g{std::vector<double>(8, 500.0)};
  const std::vector<const FirmSeries*> cs{&f};
  const auto fit = fit_firm(f, cs, g);
  CHECK(fit.degenerate);
  CHECK(fit.converged);
  CHECK(fit.alpha == 0.3);
  CHECK(fit.beta == 0.3);
  CHECK(fit.k == std::vector<double>{0.0});
  CHECK(fit.sigma == 0.0);
}

TEST_CASE("underdetermined fits are rejected") {
  const auto f = constant_series(5);  // 3 usable residuals
  const MacroSeries g{std::vector<double>(5, 500.0)};
  const std::vector<const FirmSeries*> one{&f};
  const std::vector<const FirmSeries*> none;
  CHECK_THROWS_AS(fit_firm(f, one, g), UnderdeterminedError);
  CHECK_NOTHROW(fit_firm(f, none, g));
  const auto tiny = constant_series(3);
  CHECK_THROWS_AS(fit_firm(tiny, none, MacroSeries{{1, 1, 1}}), UnderdeterminedError);
}

TEST_CASE("fit is invariant under customer relabeling") {
  GeneratorConfig cfg;
  cfg.firm_count = 30;
  cfg.mean_out_degree = 2.0;
  cfg.max_customers = 2;
  cfg.seed = 21;
  const auto syn = generate_economy(cfg);
  const auto& panel = syn.simulation.panel;
  const auto& net = syn.economy.network;
  int checked = 0;
  for (FirmIndex i = 0; i < net.firm_count(); ++i) {
    auto cs = test::customer_series(panel, net, i);
    if (cs.size() < 2) continue;
    const auto a = fit_firm(panel.firms[i], cs, panel.gdp);
    std::reverse(cs.begin(), cs.end());
    const auto b = fit_firm(panel.firms[i], cs, panel.gdp);
    CHECK(b.alpha == Approx(a.alpha).epsilon(1e-6));
    CHECK(b.beta == Approx(a.beta).epsilon(1e-6));
    CHECK(b.k[0] == Approx(a.k[1]).epsilon(1e-6));
    CHECK(b.k[1] == Approx(a.k[0]).epsilon(1e-6));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("bounds are enforced") {
  const auto syn = noiseless(7, 20);
  const auto& panel = syn.simulation.panel;
  const auto& net = syn.economy.network;
  FitOptions opt;
  opt.elasticity_max = 0.05;
  opt.initial_elasticity = 0.01;
  for (FirmIndex i = 0; i < 5; ++i) {
    const auto fit = fit_firm(panel.firms[i], test::customer_series(panel, net, i), panel.gdp, opt);
    CHECK(fit.alpha >= 0.0);
    CHECK(fit.alpha <= 0.05);
    CHECK(fit.beta <= 0.05);
  }
}

TEST_CASE("batch fit") {
  SUBCASE("empty economy") {
    PanelSeries panel;
    const auto batch = fit_all(panel, TransactionNetwork{}, {});
    CHECK(batch.fits.empty());
    CHECK(batch.failures.empty());
  }
  SUBCASE("single firm equals fit_firm") {
    const auto syn = noiseless(9, 1);
    const auto& panel = syn.simulation.panel;
    const auto batch = fit_all(panel, syn.economy.network);
    REQUIRE(batch.fits.size() == 1);
    const std::vector<const FirmSeries*> none;
    const auto direct = fit_firm(panel.firms[0], none, panel.gdp);
    CHECK(batch.fits[0].fit.alpha == direct.alpha);
    CHECK(batch.fits[0].fit.beta == direct.beta);
    CHECK(batch.fits[0].fit.iterations == direct.iterations);
  }
  SUBCASE("failures are collected") {
    auto syn = noiseless(9, 4);
    auto panel = syn.simulation.panel;
    // Two periods short of any fit.
    for (auto& f : panel.firms)
      for (auto* v : {&f.revenue, &f.capital, &f.labor, &f.equity}) v->resize(3);
    panel.periods.resize(3);
    panel.gdp.gdp.resize(3);
    const auto batch = fit_all(panel, syn.economy.network);
    CHECK(batch.fits.empty());
    CHECK(batch.failures.size() == 4);
  }
  SUBCASE("histograms count every fit") {
    const auto syn = noiseless(13, 40);
    const auto batch = fit_all(syn.simulation.panel, syn.economy.network);
    CHECK(batch.failures.empty());
    CHECK(batch.histograms.alpha.total() == batch.fits.size());
    CHECK(batch.histograms.alpha_plus_beta.total() == batch.fits.size());
    CHECK(batch.histograms.average_error.total() == batch.fits.size());
    std::size_t edges = 0;
    for (const auto& f : batch.fits) edges += f.fit.k.size();
    CHECK(batch.histograms.k.total() == edges);
    CHECK(batch.histograms.alpha.counts.size() == 20);
  }
}

TEST_CASE("histogram") {
  const std::vector<double> v{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto h = Histogram::build(v, 4);
  CHECK(h.lower == 0.0);
  CHECK(h.upper == 1.0);
  CHECK(h.counts == std::vector<std::size_t>{1, 1, 1, 2});
  const std::vector<double> same{2.0, 2.0};
  const auto s = Histogram::build(same, 3);
  CHECK(s.total() == 2);
  CHECK(s.bin_width() == Approx(1.0 / 3.0));
}
