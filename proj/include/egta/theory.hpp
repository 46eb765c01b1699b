#ifndef EGTA_THEORY_HPP
#define EGTA_THEORY_HPP

#include <Eigen/Dense>

namespace egta {

// Inputs to the closed-form regret-bound exponent: payoff separability Delta,
// noise and prior variances, the number of payoff entries, the prior
// covariance, and the squared 2-norm of the true payoff vector.
struct TheoryParams {
  double delta_sep = 0.1;
  double sigma_a2 = 0.5;
  double sigma_02 = 1.0;
  int n_entries = 16;
  Eigen::MatrixXd prior_cov;
  double m_star_norm2 = 8.0;

  static TheoryParams defaults();
};

// Bernoulli entropy in nats, with the limit convention h_b(0) = h_b(1) = 0.
double binary_entropy(double p);

// For a discrete variable with n outcomes and one outcome of probability p_i:
// entropy <= h_b(p_i) + (1 - p_i) log(n - 1).
double entropy_upper_bound(double p_i, int n);

// The explicit regret-bound exponent
//   g(T) = -cbrt( [ (Delta/2)^2 (sa2 + (T/N - 1) s02) / (sa2 s02)
//                   - 2 s02 |M*|_2^2 ] / (300 * 0.5 * logdet(I + K/sa2)) ).
double regret_exponent_g(const TheoryParams& params, double t);

// The bound curve T * e^{g(T)}, clamped to 1 where the bound is vacuous.
double regret_bound_curve(const TheoryParams& params, double t);

}  // namespace egta

#endif  // EGTA_THEORY_HPP
