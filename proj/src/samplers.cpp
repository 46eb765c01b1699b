#include "egta/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace egta {

namespace {

// Stream tags under a selection step key.
constexpr std::uint64_t kTagCurrentSet = 0;
constexpr std::uint64_t kTagCandidate = 1;
constexpr std::uint64_t kTagUniform = 2;

constexpr std::uint64_t kTagHallucValue = 0;
constexpr std::uint64_t kTagHallucSet = 1;

}  // namespace

ConfidenceInterval hoeffding_interval(double mean, long long n, double delta,
                                      double range_width) {
  if (n < 1) throw std::invalid_argument("interval requires at least one sample");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(range_width > 0.0)) throw std::invalid_argument("range width must be positive");
  const double half_width =
      std::sqrt(std::log(2.0 / delta) * range_width / (2.0 * static_cast<double>(n)));
  return ConfidenceInterval{mean - half_width, mean + half_width};
}

SamplerState SamplerState::make(int side, SamplerHyperparams hp, double epsilon,
                                std::optional<GaussianBelief> belief) {
  if (side < 2) throw std::invalid_argument("need at least 2 strategies");
  if (hp.hallucinations < 1 || hp.rank_samples < 1 || hp.queries_per_selection < 1 ||
      hp.condition_repeats < 1)
    throw std::invalid_argument("sampler hyperparameters must be positive");
  if (belief && belief->size() != side * side)
    throw std::invalid_argument("belief size does not match the game");
  SamplerState state;
  state.hp = hp;
  state.side = side;
  state.epsilon = epsilon;
  state.counts.assign(static_cast<std::size_t>(side) * side, 0);
  state.stat_counts.assign(static_cast<std::size_t>(side) * side, 0);
  state.stat_sums.assign(static_cast<std::size_t>(side) * side, 0.0);
  state.belief = std::move(belief);
  state.pair_resolved.assign(static_cast<std::size_t>(side) * (side - 1) / 2, 0);
  return state;
}

int SamplerState::pair_index(int i, int j) const {
  // pairs enumerated row-major over i < j
  return i * side - i * (i + 1) / 2 + (j - i - 1);
}

void SamplerState::commit(int entry, double value) {
  counts[static_cast<std::size_t>(entry)] += 1;
  stat_counts[static_cast<std::size_t>(entry)] += 1;
  stat_sums[static_cast<std::size_t>(entry)] += value;
  if (belief) belief = belief->condition(entry, value);
}

void SamplerState::commit_pseudo(int entry, double value) {
  stat_counts[static_cast<std::size_t>(entry)] += 1;
  stat_sums[static_cast<std::size_t>(entry)] += value;
}

ConfidenceInterval SamplerState::interval(int entry) const {
  const long long n = stat_counts[static_cast<std::size_t>(entry)];
  if (n == 0) return ConfidenceInterval{hp.payoff_lo, hp.payoff_hi};
  const double mean = stat_sums[static_cast<std::size_t>(entry)] / static_cast<double>(n);
  return hoeffding_interval(mean, n, hp.delta, hp.payoff_hi - hp.payoff_lo);
}

int argmin_index(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("empty score vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[static_cast<std::size_t>(i)] < scores[static_cast<std::size_t>(best)]) best = i;
  return best;
}

int argmax_index(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("empty score vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(best)]) best = i;
  return best;
}

namespace {

const GaussianBelief& require_belief(const SamplerState& state) {
  if (!state.belief) throw std::logic_error("this sampler requires a Gaussian belief");
  return *state.belief;
}

double estimate_entropy(const RankSampleSet& set, EntropyKind kind, int side) {
  if (kind == EntropyKind::binning) return entropy_binning(set).value;
  const RankCountBound bound = rank_count_upper_bound(1, side);
  return entropy_nsb(set, bound.as_double()).value;
}

// True when conditioning on this entry cannot move the belief at all.
bool conditioning_is_noop(const GaussianBelief& belief, int entry) {
  return belief.covariance().col(entry).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

std::vector<double> alpha_ig_scores(const SamplerState& state, EntropyKind estimator,
                                    RankCache& cache, RngKey step_key) {
  const GaussianBelief& belief = require_belief(state);
  const int entries = state.entries();
  std::vector<double> scores(static_cast<std::size_t>(entries), 0.0);
  for (int a = 0; a < entries; ++a) {
    const RngKey entry_key = step_key.child(kTagCandidate).child(static_cast<std::uint64_t>(a));
    double acc = 0.0;
    for (int i = 0; i < state.hp.hallucinations; ++i) {
      const RngKey rep_key = entry_key.child(static_cast<std::uint64_t>(i));
      Rng halluc_rng(rep_key.child(kTagHallucValue));
      const double value = belief.hallucinate_observation(a, halluc_rng);
      const GaussianBelief posterior =
          belief.condition_repeated(a, value, state.hp.condition_repeats);
      const RankSampleSet set = sample_ranks(posterior, state.hp.rank_samples, state.epsilon,
                                             &cache, rep_key.child(kTagHallucSet));
      acc += estimate_entropy(set, estimator, state.side);
    }
    scores[static_cast<std::size_t>(a)] = acc / state.hp.hallucinations;
  }
  return scores;
}

int alpha_ig_select(const SamplerState& state, EntropyKind estimator, RankCache& cache,
                    RngKey step_key) {
  return argmin_index(alpha_ig_scores(state, estimator, cache, step_key));
}

std::vector<double> alpha_wass_scores(const SamplerState& state, RankCache& cache,
                                      RngKey step_key) {
  const GaussianBelief& belief = require_belief(state);
  const int entries = state.entries();
  const RankSampleSet current = sample_ranks(belief, state.hp.rank_samples, state.epsilon, &cache,
                                             step_key.child(kTagCurrentSet));
  const detail::WeightedAtoms current_atoms = detail::collapse_atoms(current);
  std::vector<double> scores(static_cast<std::size_t>(entries), 0.0);
  for (int a = 0; a < entries; ++a) {
    if (conditioning_is_noop(belief, a)) continue;  // identical belief, divergence 0
    const RngKey entry_key = step_key.child(kTagCandidate).child(static_cast<std::uint64_t>(a));
    double acc = 0.0;
    for (int i = 0; i < state.hp.hallucinations; ++i) {
      const RngKey rep_key = entry_key.child(static_cast<std::uint64_t>(i));
      Rng halluc_rng(rep_key.child(kTagHallucValue));
      const double value = belief.hallucinate_observation(a, halluc_rng);
      const GaussianBelief posterior =
          belief.condition_repeated(a, value, state.hp.condition_repeats);
      const RankSampleSet hallucinated = sample_ranks(
          posterior, state.hp.rank_samples, state.epsilon, &cache, rep_key.child(kTagHallucSet));
      acc += detail::wasserstein_tv_atoms(current_atoms, detail::collapse_atoms(hallucinated));
    }
    scores[static_cast<std::size_t>(a)] = acc / state.hp.hallucinations;
  }
  return scores;
}

int alpha_wass_select(const SamplerState& state, RankCache& cache, RngKey step_key) {
  return argmax_index(alpha_wass_scores(state, cache, step_key));
}

int payoff_ig_select(const SamplerState& state) {
  const GaussianBelief& belief = require_belief(state);
  if (belief.diagonal()) {
    std::vector<double> scores(state.counts.size());
    for (std::size_t i = 0; i < state.counts.size(); ++i)
      scores[i] = static_cast<double>(state.counts[i]);
    return argmin_index(scores);
  }
  std::vector<double> variances(static_cast<std::size_t>(state.entries()));
  for (int a = 0; a < state.entries(); ++a)
    variances[static_cast<std::size_t>(a)] = belief.marginal_variance(a);
  return argmax_index(variances);
}

int uniform_select(const SamplerState& state, RngKey step_key) {
  Rng rng(step_key.child(kTagUniform));
  return rng.uniform_int(state.entries());
}

int rg_ucb_step(SamplerState& state) {
  const int s = state.side;
  // Refresh resolution flags; once resolved a pair stays resolved.
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      const int pair = state.pair_index(i, j);
      if (state.pair_resolved[static_cast<std::size_t>(pair)]) continue;
      const int e1 = i * s + j;
      const int e2 = j * s + i;
      if (state.stat_counts[static_cast<std::size_t>(e1)] == 0 ||
          state.stat_counts[static_cast<std::size_t>(e2)] == 0)
        continue;
      if (state.interval(e1).disjoint_from(state.interval(e2)))
        state.pair_resolved[static_cast<std::size_t>(pair)] = 1;
    }
  }

  int best = -1;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (i == j) continue;  // diagonal entries take part in no ordering
      const int pair = state.pair_index(std::min(i, j), std::max(i, j));
      if (state.pair_resolved[static_cast<std::size_t>(pair)]) continue;
      const int e = i * s + j;
      if (best == -1 ||
          state.stat_counts[static_cast<std::size_t>(e)] <
              state.stat_counts[static_cast<std::size_t>(best)])
        best = e;
    }
  }
  if (best == -1) state.rg_done = true;
  return best;
}

Eigen::MatrixXd IntervalBelief::midpoint_matrix() const {
  Eigen::MatrixXd m(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const int e = i * side + j;
      m(i, j) = 0.5 * (lower(e) + upper(e));
    }
  return m;
}

IntervalBelief rg_ucb_interval_belief(const SamplerState& state) {
  IntervalBelief belief;
  belief.side = state.side;
  belief.lower.resize(state.entries());
  belief.upper.resize(state.entries());
  for (int e = 0; e < state.entries(); ++e) {
    const ConfidenceInterval ci = state.interval(e);
    belief.lower(e) = ci.lower;
    belief.upper(e) = ci.upper;
  }
  return belief;
}

RankSampleSet sample_ranks_interval(const IntervalBelief& belief, int n, double epsilon,
                                    RankCache* cache, RngKey key) {
  const int side = belief.side;
  auto draw = [&](Rng& rng) {
    Eigen::MatrixXd m(side, side);
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) {
        const int e = i * side + j;
        m(i, j) = belief.lower(e) == belief.upper(e)
                      ? belief.lower(e)
                      : rng.uniform_in(belief.lower(e), belief.upper(e));
      }
    return m;
  };
  return sample_ranks_with(draw, side, n, epsilon, cache, key);
}

std::vector<std::pair<int, double>> inject_pseudo_samples(int entry, double payoff, int n_good,
                                                          int side) {
  if (payoff != 0.0 && payoff != 1.0)
    throw std::invalid_argument("pseudo-sample injection requires Bernoulli payoffs");
  if (n_good < 1 || n_good > side) throw std::invalid_argument("invalid block partition");
  const int row = entry / side;
  const int col = entry % side;
  auto block_of = [&](int x, int y) {
    if (x < n_good && y < n_good) return 1;
    if (x < n_good) return 2;
    if (y < n_good) return 3;
    return 4;
  };

  std::vector<std::pair<int, double>> out;
  out.emplace_back(col * side + row, 1.0 - payoff);  // anti-symmetry for the transpose
  const int block = block_of(row, col);
  if (block != 1) {
    for (int x = 0; x < side; ++x)
      for (int y = 0; y < side; ++y) {
        if (x == row && y == col) continue;  // the real sample already landed here
        if (block_of(x, y) == block) out.emplace_back(x * side + y, payoff);
      }
  }
  return out;
}

}  // namespace egta
