#ifndef EGTA_ESTIMATORS_HPP
#define EGTA_ESTIMATORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "egta/rank_belief.hpp"

namespace egta {

enum class EntropyKind { binning, nsb };

struct EntropyEstimate {
  double value = 0.0;  // nats
  EntropyKind kind = EntropyKind::binning;
  double atom_bound_used = 0.0;  // NSB only
};

// Raised when the NSB quadrature fails to converge; carries the plug-in
// entropy of the same counts as a fallback.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double plugin_fallback)
      : std::runtime_error(what), plugin_fallback(plugin_fallback) {}
  double plugin_fallback;
};

// Plug-in entropy of the histogram obtained by rounding every coordinate to
// two decimal places.
EntropyEstimate entropy_binning(const RankSampleSet& set);

// Nemenman-Shafee-Bialek estimate for the distribution over exactly-equal
// rank atoms, with atom_bound as the assumed alphabet size. Computed by
// adaptive quadrature over the prior-uniform reparameterization of the
// Dirichlet concentration.
EntropyEstimate entropy_nsb(const RankSampleSet& set, double atom_bound);

// NSB on raw atom counts (test and reuse surface).
double nsb_entropy_from_counts(const std::vector<long long>& counts, double atom_bound);

// Upper bound 2^{S^k * k(S-1)} on the number of infinite-alpha ranks for k
// populations of S strategies. Values beyond 2^62 are reported through the
// exponent only.
struct RankCountBound {
  long long exponent2 = 0;  // the bound is 2^exponent2
  bool representable = false;
  unsigned long long value = 0;  // valid when representable

  double as_double() const;
};

RankCountBound rank_count_upper_bound(int num_populations, int strategies);

// Exact optimal-transport cost between the two empirical rank distributions
// (uniform weights) under the total-variation ground cost
// c(x, y) = 0.5 * ||x - y||_1. Equal samples are collapsed into weighted
// atoms first; the reduced problem is solved by successive-shortest-path
// min-cost flow.
double wasserstein_tv(const RankSampleSet& p, const RankSampleSet& q);

namespace detail {
double digamma(double x);
double plugin_entropy(const std::vector<long long>& counts);

// Samples collapsed into distinct atoms with multiplicities. Collapsing is
// by exact (bitwise) equality, which is what rank samples drawn through a
// shared cache exhibit.
struct WeightedAtoms {
  std::vector<Eigen::VectorXd> points;
  std::vector<long long> weights;
  long long total = 0;
};

WeightedAtoms collapse_atoms(const RankSampleSet& set);
double wasserstein_tv_atoms(const WeightedAtoms& p, const WeightedAtoms& q);
}  // namespace detail

}  // namespace egta

#endif  // EGTA_ESTIMATORS_HPP
