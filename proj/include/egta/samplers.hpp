#ifndef EGTA_SAMPLERS_HPP
#define EGTA_SAMPLERS_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "egta/alpharank.hpp"
#include "egta/belief.hpp"
#include "egta/estimators.hpp"
#include "egta/rank_belief.hpp"
#include "egta/rng.hpp"

namespace egta {

// Hyperparameters shared by the query-selection strategies. Names follow the
// roles: hallucinations per candidate (N_e), rank samples per entropy
// estimate (N_b), real observations per selection (N_r), repeated
// conditionings per hallucination (N_c), RG-UCB confidence delta, and the
// payoff range [payoff_lo, payoff_hi].
struct SamplerHyperparams {
  int hallucinations = 20;
  int rank_samples = 1000;
  int queries_per_selection = 10;
  int condition_repeats = 100;
  double delta = 0.4;
  double payoff_lo = 0.0;
  double payoff_hi = 1.0;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool disjoint_from(const ConfidenceInterval& other) const {
    return lower > other.upper || other.lower > upper;
  }
};

// Hoeffding interval exactly as half-width sqrt(log(2/delta) * (b-a) / (2N))
// around the empirical mean.
ConfidenceInterval hoeffding_interval(double mean, long long n, double delta, double range_width);

// Mutable bookkeeping for one run of any sampler. counts tracks real
// environment observations; stat_counts/stat_sums additionally include
// RG-UCB pseudo-samples and drive its confidence intervals.
struct SamplerState {
  SamplerHyperparams hp;
  int side = 0;
  double epsilon = 1e-6;
  std::vector<long long> counts;
  std::vector<long long> stat_counts;
  std::vector<double> stat_sums;
  std::optional<GaussianBelief> belief;
  std::vector<char> pair_resolved;  // one flag per (i < j) pair, sticky
  bool rg_done = false;

  static SamplerState make(int side, SamplerHyperparams hp, double epsilon,
                           std::optional<GaussianBelief> belief);

  int entries() const { return side * side; }
  int pair_count() const { return side * (side - 1) / 2; }
  int pair_index(int i, int j) const;  // requires i < j

  // Commit one real observation: updates counts and the belief if present.
  void commit(int entry, double value);
  // Commit an RG-UCB pseudo-sample: updates interval statistics only.
  void commit_pseudo(int entry, double value);

  ConfidenceInterval interval(int entry) const;
};

// Deterministic tie-breaking selection helpers (lowest index wins).
int argmin_index(const std::vector<double>& scores);
int argmax_index(const std::vector<double>& scores);

// Average hallucinated-posterior entropy per candidate entry (Algorithm
// scores); alpha_ig_select returns the argmin.
std::vector<double> alpha_ig_scores(const SamplerState& state, EntropyKind estimator,
                                    RankCache& cache, RngKey step_key);
int alpha_ig_select(const SamplerState& state, EntropyKind estimator, RankCache& cache,
                    RngKey step_key);

// Average Wasserstein divergence between the current rank belief and the
// hallucinated one; alpha_wass_select returns the argmax. Candidates whose
// conditioning provably cannot change the belief score exactly zero.
std::vector<double> alpha_wass_scores(const SamplerState& state, RankCache& cache,
                                      RngKey step_key);
int alpha_wass_select(const SamplerState& state, RankCache& cache, RngKey step_key);

// Greedy information gain on the payoffs themselves: least-observed entry
// under an independent kernel, highest posterior variance otherwise.
int payoff_ig_select(const SamplerState& state);

int uniform_select(const SamplerState& state, RngKey step_key);

// Focus entry for RG-UCB (least stat-sampled entry participating in an
// unresolved ordering) or -1 once every transition-relevant ordering is
// resolved. Updates the sticky resolution flags and rg_done.
int rg_ucb_step(SamplerState& state);

// Payoff distribution used for metric evaluation of RG-UCB: independent
// uniform on each entry's current confidence interval (the full payoff range
// for unseen entries).
struct IntervalBelief {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  int side = 0;

  Eigen::MatrixXd midpoint_matrix() const;
};

IntervalBelief rg_ucb_interval_belief(const SamplerState& state);
RankSampleSet sample_ranks_interval(const IntervalBelief& belief, int n, double epsilon,
                                    RankCache* cache, RngKey key);

// Pseudo-samples injected for the prior-knowledge RG-UCB variant on Good/Bad
// games: the transposed entry receives 1 - p, and every other entry of the
// observed entry's block receives p unless the entry lies in the good-vs-good
// block. One expansion level only.
std::vector<std::pair<int, double>> inject_pseudo_samples(int entry, double payoff, int n_good,
                                                          int side);

}  // namespace egta

#endif  // EGTA_SAMPLERS_HPP
