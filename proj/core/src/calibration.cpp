#include "chainbk/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace chainbk {

FitProblem::FitProblem(const FirmSeries& firm, std::span<const FirmSeries* const> customers,
                       const MacroSeries& gdp)
    : horizon_(firm.revenue.size()), customer_count_(customers.size()) {
  const std::size_t n = horizon_;
  if (firm.capital.size() != n || firm.labor.size() != n || gdp.size() != n)
    throw std::invalid_argument("fit: firm series and gdp must share one period axis");
  for (const FirmSeries* c : customers)
    if (c == nullptr || c->revenue.size() != n)
      throw std::invalid_argument("fit: customer series misaligned with firm series");

  const std::size_t slots = residual_count();
  growth_.resize(slots);
  capital_ratio_.resize(slots);
  labor_ratio_.resize(slots);
  demand_.resize(slots * customer_count_);
  for (std::size_t t = 1; t + 1 < n; ++t) {
    const std::size_t s = t - 1;
    growth_[s] = firm.revenue[t + 1] / firm.revenue[t];
    capital_ratio_[s] = firm.capital[t + 1] / firm.capital[t];
    labor_ratio_[s] = firm.labor[t + 1] / firm.labor[t];
    const double g = gdp.ratio(t);
    for (std::size_t j = 0; j < customer_count_; ++j)
      demand_[s * customer_count_ + j] = customers[j]->revenue[t] / customers[j]->revenue[t - 1] - g;
  }
}

double FitProblem::residual(std::size_t t, double alpha, double beta,
                            std::span<const double> k) const {
  if (t < 1 || t + 2 > horizon_) throw std::out_of_range("fit: residual period out of range");
  if (k.size() != customer_count_)
    throw std::invalid_argument("fit: k has wrong length for this firm");
  const std::size_t s = t - 1;
  double interaction = 0.0;
  for (std::size_t j = 0; j < customer_count_; ++j)
    interaction += k[j] * demand_[s * customer_count_ + j];
  return growth_[s] -
         std::pow(capital_ratio_[s], alpha) * std::pow(labor_ratio_[s], beta) - interaction;
}

std::vector<double> FitProblem::residuals(std::span<const double> x) const {
  std::vector<double> out(residual_count());
  const auto k = x.subspan(2);
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = residual(s + 1, x[0], x[1], k);
  return out;
}

double FitProblem::sum_squares(std::span<const double> x) const {
  double sum = 0.0;
  for (double e : residuals(x)) sum += e * e;
  return sum;
}

double residual(const FirmSeries& firm, std::span<const FirmSeries* const> customers,
                const MacroSeries& gdp, std::size_t t, double alpha, double beta,
                std::span<const double> k) {
  return FitProblem(firm, customers, gdp).residual(t, alpha, beta, k);
}

double neg_log_likelihood_core(std::span<const double> residuals, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("likelihood: sigma must be positive");
  double sum = 0.0;
  for (double e : residuals) sum += e * e;
  return sum / (2.0 * sigma * sigma);
}

double neg_log_likelihood_core(const FitProblem& problem, std::span<const double> x,
                               double sigma) {
  return neg_log_likelihood_core(problem.residuals(x), sigma);
}

double average_error(std::span<const double> residuals) {
  if (residuals.empty()) return 0.0;
  double sum = 0.0;
  for (double e : residuals) sum += e * e;
  return std::sqrt(sum / static_cast<double>(residuals.size()));
}

std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step_scale) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = step_scale * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

namespace {

using Vec = Eigen::VectorXd;

struct Bounds {
  Vec lo;
  Vec hi;

  Vec project(const Vec& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

  // Gradient with components zeroed where a bound blocks descent.
  Vec projected_gradient(const Vec& x, const Vec& g) const {
    Vec pg = g;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) pg[i] = 0.0;
    return pg;
  }
};

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

bool is_degenerate(const FitProblem& problem, const Vec& x) {
  const auto n = static_cast<Eigen::Index>(problem.residual_count());
  const auto p = x.size();
  Eigen::MatrixXd jac(n, p);
  std::vector<double> probe = to_std(x);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const auto up = problem.residuals(probe);
    probe[i] = x[i] - h;
    const auto down = problem.residuals(probe);
    probe[i] = x[i];
    for (Eigen::Index r = 0; r < n; ++r) jac(r, i) = (up[r] - down[r]) / (2.0 * h);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac.transpose() * jac,
                                                           Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  return !(largest > 0.0) || smallest <= 1e-12 * largest;
}

}  // namespace

FitResult fit_problem(const FitProblem& problem, const FitOptions& options) {
  const std::size_t p = problem.parameter_count();
  const std::size_t n = problem.residual_count();
  if (p >= n)
    throw UnderdeterminedError("fit: " + std::to_string(p) + " parameters but only " +
                               std::to_string(n) + " usable residuals");

  const auto dim = static_cast<Eigen::Index>(p);
  Bounds bounds{Vec(dim), Vec(dim)};
  bounds.lo.head(2).setConstant(options.elasticity_min);
  bounds.hi.head(2).setConstant(options.elasticity_max);
  bounds.lo.tail(dim - 2).setConstant(options.k_min);
  bounds.hi.tail(dim - 2).setConstant(options.k_max);

  Vec x(dim);
  x.head(2).setConstant(options.initial_elasticity);
  x.tail(dim - 2).setConstant(options.initial_k);
  x = bounds.project(x);

  auto objective = [&](std::span<const double> v) { return problem.sum_squares(v); };
  auto gradient = [&](const Vec& v) {
    const auto g = numerical_gradient(objective, to_std(v));
    return Vec(Eigen::Map<const Vec>(g.data(), dim));
  };

  FitResult out;
  double f = objective(to_std(x));
  Vec g = gradient(x);
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(dim, dim);
  out.objective_history.push_back(f);

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    if (bounds.projected_gradient(x, g).norm() < options.gradient_tolerance) {
      out.converged = true;
      break;
    }
    Vec direction = -inv_hessian * g;
    if (g.dot(direction) >= 0.0) {
      inv_hessian.setIdentity();
      direction = -g;
    }

    bool accepted = false;
    Vec x_new;
    double f_new = f;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      for (int k = 0; k < 60; ++k, step *= 0.5) {
        x_new = bounds.project(x + step * direction);
        f_new = objective(to_std(x_new));
        if (f_new <= f + options.armijo * g.dot(x_new - x)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        inv_hessian.setIdentity();
        direction = -g;
      }
    }
    if (!accepted || (x_new - x).norm() == 0.0) break;

    const Vec g_new = gradient(x_new);
    const Vec s = x_new - x;
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      inv_hessian = (eye - rho * s * y.transpose()) * inv_hessian *
                        (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
    }
    x = x_new;
    f = f_new;
    g = g_new;
    out.iterations = iter + 1;
    out.objective_history.push_back(f);
  }
  if (!out.converged)
    out.converged = bounds.projected_gradient(x, g).norm() < options.gradient_tolerance;

  out.alpha = x[0];
  out.beta = x[1];
  out.k.assign(x.data() + 2, x.data() + dim);
  const auto eps = problem.residuals(to_std(x));
  out.sse = std::inner_product(eps.begin(), eps.end(), eps.begin(), 0.0);
  out.sigma = std::sqrt(out.sse / static_cast<double>(n));
  out.average_error = average_error(eps);
  out.degenerate = is_degenerate(problem, x);
  return out;
}

FitResult fit_firm(const FirmSeries& firm, std::span<const FirmSeries* const> customers,
                   const MacroSeries& gdp, const FitOptions& options) {
  return fit_problem(FitProblem(firm, customers, gdp), options);
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Histogram Histogram::build(std::span<const double> values, std::size_t bins) {
  Histogram h;
  h.counts.assign(std::max<std::size_t>(bins, 1), 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lower = *mn;
  h.upper = *mx;
  if (h.upper == h.lower) {
    h.lower -= 0.5;
    h.upper += 0.5;
  }
  const double width = h.bin_width();
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.lower) / width);
    h.counts[std::min(b, h.counts.size() - 1)] += 1;
  }
  return h;
}

FitHistograms summarize(std::span<const FirmFit> fits, std::size_t bins) {
  std::vector<double> a, b, ab, k, err;
  for (const auto& f : fits) {
    a.push_back(f.fit.alpha);
    b.push_back(f.fit.beta);
    ab.push_back(f.fit.alpha + f.fit.beta);
    k.insert(k.end(), f.fit.k.begin(), f.fit.k.end());
    err.push_back(f.fit.average_error);
  }
  return {Histogram::build(a, bins), Histogram::build(b, bins), Histogram::build(ab, bins),
          Histogram::build(k, bins), Histogram::build(err, bins)};
}

BatchFit fit_all(const PanelSeries& panel, const TransactionNetwork& network,
                 const FitOptions& options) {
  BatchFit out;
  for (std::size_t f = 0; f < panel.firm_count(); ++f) {
    const auto& id = panel.firm_ids[f];
    try {
      FirmFit ff;
      ff.firm_id = id;
      std::vector<const FirmSeries*> customers;
      if (auto idx = network.find(id)) {
        for (const Link& c : network.customers(*idx)) {
          const auto& cid = network.id(c.firm);
          auto ci = panel.find(cid);
          if (!ci) throw std::invalid_argument("customer '" + cid + "' has no panel series");
          customers.push_back(&panel.firms[*ci]);
          ff.customer_ids.push_back(cid);
        }
      }
      ff.fit = fit_firm(panel.firms[f], customers, panel.gdp, options);
      out.fits.push_back(std::move(ff));
    } catch (const std::exception& e) {
      out.failures.emplace(id, e.what());
    }
  }
  out.histograms = summarize(out.fits, options.histogram_bins);
  return out;
}

}  // namespace chainbk
