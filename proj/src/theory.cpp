#include "egta/theory.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace egta {

TheoryParams TheoryParams::defaults() {
  TheoryParams params;
  params.prior_cov = Eigen::MatrixXd::Identity(params.n_entries, params.n_entries);
  return params;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p));
}

double entropy_upper_bound(double p_i, int n) {
  if (n < 2) throw std::invalid_argument("need at least 2 outcomes");
  return binary_entropy(p_i) + (1.0 - p_i) * std::log(static_cast<double>(n - 1));
}

namespace {

double half_log_det_capacity(const TheoryParams& params) {
  const int n = params.n_entries;
  if (params.prior_cov.rows() != n || params.prior_cov.cols() != n)
    throw std::invalid_argument("prior covariance shape does not match n_entries");
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(n, n) + params.prior_cov / params.sigma_a2;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("capacity matrix is not positive definite");
  double log_det = 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));
  return 0.5 * log_det;
}

}  // namespace

double regret_exponent_g(const TheoryParams& params, double t) {
  if (t < 1.0) throw std::invalid_argument("t must be >= 1");
  if (!(params.sigma_a2 > 0.0 && params.sigma_02 > 0.0))
    throw std::invalid_argument("variances must be positive");
  if (params.n_entries < 1) throw std::invalid_argument("n_entries must be positive");
  if (params.m_star_norm2 < 0.0) throw std::invalid_argument("norm must be nonnegative");

  const double gamma = half_log_det_capacity(params);
  if (!(gamma > 0.0)) throw std::runtime_error("degenerate prior: log-det capacity is zero");

  const double half_delta_sq = std::pow(params.delta_sep / 2.0, 2);
  const double precision = (params.sigma_a2 + (t / params.n_entries - 1.0) * params.sigma_02) /
                           (params.sigma_a2 * params.sigma_02);
  const double numerator = half_delta_sq * precision - 2.0 * params.sigma_02 * params.m_star_norm2;
  return -std::cbrt(numerator / (300.0 * gamma));
}

double regret_bound_curve(const TheoryParams& params, double t) {
  const double raw = t * std::exp(regret_exponent_g(params, t));
  return std::min(raw, 1.0);
}

}  // namespace egta
