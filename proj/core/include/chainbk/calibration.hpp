#pragma once

// Maximum-likelihood estimation of alpha, beta, k_ij and sigma per firm from
// panel data, under Gaussian growth residuals.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbk/network.hpp"
#include "chainbk/panel.hpp"

namespace chainbk {

/// Thrown when a firm has at least as many parameters as usable residuals.
class UnderdeterminedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FitOptions {
  double gradient_tolerance = 1e-8;
  std::size_t max_iterations = 500;
  double armijo = 1e-4;  ///< sufficient-decrease constant of the line search
  double elasticity_min = 0.0;
  double elasticity_max = 2.0;
  double k_min = -2.0;
  double k_max = 2.0;
  double initial_elasticity = 0.3;
  double initial_k = 0.0;
  std::size_t histogram_bins = 20;
};

/// Growth-ratio regression problem of one firm. Parameter vector layout is
/// [alpha, beta, k_1 .. k_m] with customers in the order given.
class FitProblem {
 public:
  /// `customers` holds the revenue series of the firm's customers; they and
  /// `gdp` must be aligned with `firm`.
  FitProblem(const FirmSeries& firm, std::span<const FirmSeries* const> customers,
             const MacroSeries& gdp);

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t customer_count() const noexcept { return customer_count_; }
  std::size_t parameter_count() const noexcept { return 2 + customer_count_; }
  /// Periods t = 1 .. T-2 (0-based) have R(t-1), R(t) and R(t+1).
  std::size_t residual_count() const noexcept { return horizon_ >= 2 ? horizon_ - 2 : 0; }

  /// Residual at 0-based period t in [1, T-2]:
  /// R(t+1)/R(t) - (K(t+1)/K(t))^alpha (L(t+1)/L(t))^beta - sum_j f_ij(t).
  double residual(std::size_t t, double alpha, double beta, std::span<const double> k) const;

  /// All residuals for parameter vector x, in period order.
  std::vector<double> residuals(std::span<const double> x) const;
  double sum_squares(std::span<const double> x) const;

 private:
  std::size_t horizon_ = 0;
  std::size_t customer_count_ = 0;
  // Indexed by residual slot (t - 1).
  std::vector<double> growth_;
  std::vector<double> capital_ratio_;
  std::vector<double> labor_ratio_;
  std::vector<double> demand_;  // row-major [slot][customer]: R_j(t)/R_j(t-1) - G(t)/G(t-1)
};

/// Residual of one firm at 0-based period t; throws std::out_of_range
/// unless 1 <= t <= T-2.
double residual(const FirmSeries& firm, std::span<const FirmSeries* const> customers,
                const MacroSeries& gdp, std::size_t t, double alpha, double beta,
                std::span<const double> k);

/// sum_t eps_t^2 / (2 sigma^2); throws std::domain_error for sigma <= 0.
double neg_log_likelihood_core(std::span<const double> residuals, double sigma);
double neg_log_likelihood_core(const FitProblem& problem, std::span<const double> x,
                               double sigma);

/// Root-mean-square residual.
double average_error(std::span<const double> residuals);

/// Central-difference gradient with step scale * max(1, |x_i|).
std::vector<double> numerical_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step_scale = 1e-6);

struct FitResult {
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<double> k;  ///< aligned with the customer order of the problem
  double sigma = 0.0;     ///< sqrt(mean eps^2), the Gaussian MLE
  double sse = 0.0;       ///< sum of squared residuals at the optimum
  double average_error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;  ///< objective flat in some direction
  std::vector<double> objective_history;  ///< sum of squares per accepted iterate
};

/// Minimizes the residual sum of squares by projected BFGS with numerical
/// gradients and a backtracking line search, then sets sigma to the RMS
/// residual. Throws UnderdeterminedError when 2 + customers >= T - 2.
FitResult fit_problem(const FitProblem& problem, const FitOptions& options = {});

FitResult fit_firm(const FirmSeries& firm, std::span<const FirmSeries* const> customers,
                   const MacroSeries& gdp, const FitOptions& options = {});

struct Histogram {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::size_t> counts;

  double bin_width() const {
    return counts.empty() ? 0.0 : (upper - lower) / static_cast<double>(counts.size());
  }
  std::size_t total() const;
  /// Bins spanning [min, max] of the data; a unit-wide range when all values
  /// coincide.
  static Histogram build(std::span<const double> values, std::size_t bins);
};

struct FitHistograms {
  Histogram alpha;
  Histogram beta;
  Histogram alpha_plus_beta;
  Histogram k;
  Histogram average_error;
};

struct FirmFit {
  std::string firm_id;
  std::vector<std::string> customer_ids;
  FitResult fit;
};

struct BatchFit {
  std::vector<FirmFit> fits;                  ///< panel order
  std::map<std::string, std::string> failures;  ///< firm id -> reason
  FitHistograms histograms;
};

FitHistograms summarize(std::span<const FirmFit> fits, std::size_t bins);

/// Fits every firm of the panel against its customers in `network`. Per-firm
/// errors (e.g. underdetermined) are collected in `failures`.
BatchFit fit_all(const PanelSeries& panel, const TransactionNetwork& network,
                 const FitOptions& options = {});

}  // namespace chainbk
