#include "egta/alpharank.hpp"

#include <cmath>
#include <limits>

namespace egta {

namespace {

// Logistic selection ratio (1 - e^{-a d}) / (1 - e^{-a m d}), arranged so no
// exponential ever overflows: exponents are kept nonpositive on both
// branches, and expm1 keeps the alpha -> 0 limit (1/m) exact. Underflow then
// produces the ordering-based limits (1 for a winning deviation, 0 for a
// losing one) on its own.
double selection_ratio(double alpha, int m, double diff) {
  if (m == 1) return 1.0;  // numerator equals denominator identically
  const double x1 = -alpha * diff;
  const double x2 = x1 * static_cast<double>(m);
  if (x1 == 0.0) return 1.0 / m;  // alpha == 0: neutral drift
  if (diff > 0.0) return std::expm1(x1) / std::expm1(x2);
  return std::exp(x1 - x2) * std::expm1(-x1) / std::expm1(-x2);
}

void validate_chain(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = p(i, j);
      if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
        throw std::invalid_argument("transition entries must lie in [0, 1]");
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > 1e-12)
      throw std::invalid_argument("transition rows must sum to 1");
  }
}

Eigen::VectorXd stationary_direct(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(b);
  // One step of iterative refinement; cheap and tightens the residual for
  // nearly reducible chains (tiny epsilon).
  x += lu.solve(b - a * x);
  return x;
}

Eigen::VectorXd stationary_power(const Eigen::MatrixXd& p, double tol, long long max_iters) {
  const int n = static_cast<int>(p.rows());
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
  const Eigen::MatrixXd pt = p.transpose();
  for (long long it = 0; it < max_iters; ++it) {
    // Damped update keeps the same fixed point and sidesteps periodic chains.
    Eigen::VectorXd next = 0.5 * (pt * x) + 0.5 * x;
    next /= next.sum();
    const double delta = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (delta < tol) return x;
  }
  const double resid = (pt * x - x).cwiseAbs().maxCoeff();
  throw SolverError("power iteration did not converge", resid);
}

Eigen::VectorXd cleanup_and_normalize(Eigen::VectorXd x) {
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0) x(i) = 0.0;
  }
  const double sum = x.sum();
  if (!(sum > 0.0)) throw SolverError("stationary solve produced a null vector", 1.0);
  return x / sum;
}

double residual_of(const Eigen::MatrixXd& p, const Eigen::VectorXd& x) {
  return (p.transpose() * x - x).cwiseAbs().maxCoeff();
}

}  // namespace

TransitionMatrix build_transition_finite_alpha(const PayoffTensor& payoffs, double alpha,
                                               int pop_size) {
  if (alpha < 0.0 || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
  if (pop_size < 1) throw std::invalid_argument("population size m must be >= 1");
  if (payoffs.num_players() < 2) throw std::invalid_argument("need at least 2 players");

  const auto& strategies = payoffs.strategies_per_player();
  const int k = payoffs.num_players();
  const int n = payoffs.num_profiles();
  int deviations = 0;
  for (int s : strategies) deviations += s - 1;
  if (deviations == 0) throw std::invalid_argument("degenerate game: no deviations exist");
  const double eta = 1.0 / deviations;

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int idx = 0; idx < n; ++idx) {
    std::vector<int> profile = payoffs.decode_profile(idx);
    double off_sum = 0.0;
    for (int player = 0; player < k; ++player) {
      const int current = profile[player];
      const double here = payoffs.value(player, idx);
      for (int alt = 0; alt < strategies[player]; ++alt) {
        if (alt == current) continue;
        std::vector<int> dev = profile;
        dev[player] = alt;
        const int dev_idx = payoffs.profile_index(dev);
        const double there = payoffs.value(player, dev_idx);
        double prob;
        if (there == here) {
          prob = eta / pop_size;
        } else {
          prob = eta * selection_ratio(alpha, pop_size, there - here);
        }
        p(idx, dev_idx) = prob;
        off_sum += prob;
      }
    }
    p(idx, idx) = 1.0 - off_sum;
  }
  TransitionMatrix out{std::move(p)};
  validate_chain(out.p);
  return out;
}

TransitionMatrix build_transition_single_pop(const PayoffTensor& payoffs, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  const int s = payoffs.side();
  if (s < 2) throw std::invalid_argument("single-population chain needs at least 2 strategies");
  const Eigen::MatrixXd m = payoffs.matrix();
  return transition_from_pattern(ordering_pattern(m), s, epsilon);
}

TransitionMatrix build_transition_single_pop_finite(const PayoffTensor& payoffs, double alpha,
                                                    int pop_size) {
  if (alpha < 0.0 || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
  if (pop_size < 1) throw std::invalid_argument("population size m must be >= 1");
  const int s = payoffs.side();
  if (s < 2) throw std::invalid_argument("single-population chain needs at least 2 strategies");
  const Eigen::MatrixXd m = payoffs.matrix();
  const double eta = 1.0 / (s - 1);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(s, s);
  for (int i = 0; i < s; ++i) {
    double off_sum = 0.0;
    for (int j = 0; j < s; ++j) {
      if (i == j) continue;
      const double diff = m(j, i) - m(i, j);
      const double prob =
          diff == 0.0 ? eta / pop_size : eta * selection_ratio(alpha, pop_size, diff);
      p(i, j) = prob;
      off_sum += prob;
    }
    p(i, i) = 1.0 - off_sum;
  }
  TransitionMatrix out{std::move(p)};
  validate_chain(out.p);
  return out;
}

AlphaRank stationary_distribution(const TransitionMatrix& chain) {
  validate_chain(chain.p);
  const int n = chain.dim();
  constexpr double kResidTol = 1e-10;

  Eigen::VectorXd best;
  double best_resid = std::numeric_limits<double>::infinity();
  auto consider = [&](auto&& solve) {
    try {
      Eigen::VectorXd x = cleanup_and_normalize(solve());
      const double r = residual_of(chain.p, x);
      if (r < best_resid) {
        best = std::move(x);
        best_resid = r;
      }
    } catch (const SolverError&) {
    }
  };
  auto direct = [&] { return stationary_direct(chain.p); };
  auto power = [&] { return stationary_power(chain.p, 1e-12, 1000000); };

  if (n <= 64) {
    consider(direct);
    if (best_resid > kResidTol) consider(power);
  } else {
    consider(power);
    if (best_resid > kResidTol) consider(direct);
  }
  if (!(best_resid <= kResidTol))
    throw SolverError("stationary solve residual too large", best_resid);
  return AlphaRank{std::move(best)};
}

AlphaRank alpha_rank(const PayoffTensor& payoffs, double epsilon) {
  return stationary_distribution(build_transition_single_pop(payoffs, epsilon));
}

bool orderings_equal(const PayoffTensor& m1, const PayoffTensor& m2) {
  if (m1.strategies_per_player() != m2.strategies_per_player() ||
      m1.num_players() != m2.num_players())
    throw std::invalid_argument("orderings_equal requires matching shapes");
  return ordering_pattern(m1.matrix()) == ordering_pattern(m2.matrix());
}

OrderPattern ordering_pattern(const Eigen::MatrixXd& m) {
  const int s = static_cast<int>(m.rows());
  OrderPattern pattern;
  pattern.reserve(static_cast<std::size_t>(s) * (s - 1) / 2);
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      const double a = m(j, i);
      const double b = m(i, j);
      pattern.push_back(a > b ? 2 : (a < b ? 0 : 1));
    }
  }
  return pattern;
}

TransitionMatrix transition_from_pattern(const OrderPattern& pattern, int side, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  if (side < 2) throw std::invalid_argument("side must be >= 2");
  if (pattern.size() != static_cast<std::size_t>(side) * (side - 1) / 2)
    throw std::invalid_argument("pattern length does not match side");

  const double eta = 1.0 / (side - 1);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(side, side);
  std::size_t idx = 0;
  for (int i = 0; i < side; ++i) {
    for (int j = i + 1; j < side; ++j, ++idx) {
      // pattern: 2 means M(j,i) > M(i,j): moving i -> j is favored.
      double ij, ji;
      switch (pattern[idx]) {
        case 2:
          ij = eta * (1.0 - epsilon);
          ji = eta * epsilon;
          break;
        case 0:
          ij = eta * epsilon;
          ji = eta * (1.0 - epsilon);
          break;
        default:
          ij = 0.5 * eta;
          ji = 0.5 * eta;
          break;
      }
      p(i, j) = ij;
      p(j, i) = ji;
    }
  }
  for (int i = 0; i < side; ++i) {
    double off = 0.0;
    for (int j = 0; j < side; ++j)
      if (j != i) off += p(i, j);
    p(i, i) = 1.0 - off;
  }
  TransitionMatrix out{std::move(p)};
  validate_chain(out.p);
  return out;
}

const Eigen::VectorXd& RankCache::rank(const OrderPattern& pattern, int side) {
  std::string key(reinterpret_cast<const char*>(pattern.data()), pattern.size());
  auto it = map_.find(key);
  if (it != map_.end()) return it->second;
  AlphaRank r = stationary_distribution(transition_from_pattern(pattern, side, epsilon_));
  auto [ins, ok] = map_.emplace(std::move(key), std::move(r.p));
  return ins->second;
}

}  // namespace egta
