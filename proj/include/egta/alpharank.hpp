#ifndef EGTA_ALPHARANK_HPP
#define EGTA_ALPHARANK_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "egta/payoff_tensor.hpp"

namespace egta {

// Row-stochastic transition matrix over strategy profiles.
struct TransitionMatrix {
  Eigen::MatrixXd p;

  int dim() const { return static_cast<int>(p.rows()); }
};

// Stationary distribution of the response-graph chain: one probability per
// strategy profile (per strategy in the single-population case).
struct AlphaRank {
  Eigen::VectorXd p;

  int dim() const { return static_cast<int>(p.size()); }
};

// Raised when the stationary solver cannot reach the required residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

// Finite-alpha multi-population chain over the full profile space. Off-
// diagonal entries follow the logistic-ratio formula for single-player
// deviations; profiles differing in more than one player do not connect.
TransitionMatrix build_transition_finite_alpha(const PayoffTensor& payoffs, double alpha,
                                               int pop_size);

// Infinite-alpha single-population chain with perturbation epsilon in (0, 0.5):
// for sigma != tau the entry is (S-1)^{-1} * (1-eps), (S-1)^{-1} * eps, or
// 0.5 * (S-1)^{-1} depending on how M(tau, sigma) compares with M(sigma, tau).
TransitionMatrix build_transition_single_pop(const PayoffTensor& payoffs, double epsilon);

// Finite-alpha variant of the single-population chain (logistic ratio on
// M(tau, sigma) - M(sigma, tau)); at large alpha and m=2 this converges to the
// infinite-alpha builder's structure with epsilon -> 0.
TransitionMatrix build_transition_single_pop_finite(const PayoffTensor& payoffs, double alpha,
                                                    int pop_size);

AlphaRank stationary_distribution(const TransitionMatrix& chain);

// f: payoff matrix -> alpha-rank, the composition used everywhere downstream.
AlphaRank alpha_rank(const PayoffTensor& payoffs, double epsilon);

// True iff both matrices order every transition-relevant pair of entries the
// same way: sign(M(j,i) - M(i,j)) for all i < j.
bool orderings_equal(const PayoffTensor& m1, const PayoffTensor& m2);

// --- ordering-pattern machinery -------------------------------------------
//
// In the infinite-alpha regime the transition matrix depends only on the
// comparison pattern of opposing entries, so stationary solves can be shared
// between payoff draws with equal patterns.

// One trit per pair (i < j), row-major over pairs: 0 if M(j,i) < M(i,j),
// 1 on ties, 2 if M(j,i) > M(i,j).
using OrderPattern = std::vector<std::int8_t>;

OrderPattern ordering_pattern(const Eigen::MatrixXd& m);
TransitionMatrix transition_from_pattern(const OrderPattern& pattern, int side, double epsilon);

// Memo from ordering pattern to stationary distribution for a fixed epsilon.
class RankCache {
 public:
  explicit RankCache(double epsilon) : epsilon_(epsilon) {}

  const Eigen::VectorXd& rank(const OrderPattern& pattern, int side);

  double epsilon() const { return epsilon_; }
  std::size_t size() const { return map_.size(); }

 private:
  double epsilon_;
  std::unordered_map<std::string, Eigen::VectorXd> map_;
};

}  // namespace egta

#endif  // EGTA_ALPHARANK_HPP
