#ifndef EGTA_RANK_BELIEF_HPP
#define EGTA_RANK_BELIEF_HPP

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "egta/alpharank.hpp"
#include "egta/belief.hpp"
#include "egta/rng.hpp"

namespace egta {

// Empirical representation of the belief over alpha-ranks: a bag of sampled
// rank vectors plus the conventions used to turn them into atoms.
struct RankSampleSet {
  std::vector<Eigen::VectorXd> samples;
  double epsilon_used = 1e-6;
  int aggregation_precision = 3;

  int count() const { return static_cast<int>(samples.size()); }
};

// Draws n payoff samples from the belief and maps each through alpha_rank.
// Draw i uses the substream key.child(i), so results do not depend on
// evaluation order. A draw whose stationary solve fails is retried once with
// a fresh substream before the failure propagates.
RankSampleSet sample_ranks(const GaussianBelief& belief, int n, double epsilon, RankCache* cache,
                           RngKey key);

// Internal building block shared with samplers that draw payoff matrices from
// something other than a Gaussian belief. draw(rng) must return the S x S
// payoff matrix of one sample.
RankSampleSet sample_ranks_with(const std::function<Eigen::MatrixXd(Rng&)>& draw, int side, int n,
                                double epsilon, RankCache* cache, RngKey key);

// Histogram over samples rounded to decimal_places (2 or 3); counts sum to
// the sample count. Atoms are returned sorted lexicographically.
std::vector<std::pair<Eigen::VectorXd, int>> aggregate(const RankSampleSet& set,
                                                       int decimal_places);

// Highest-count atom after rounding at the set's aggregation precision; ties
// broken toward the lexicographically smallest rounded vector. The result is
// the rounded atom itself.
AlphaRank mode(const RankSampleSet& set);

// Fraction of samples whose L1 distance to target is below tol.
double prob_of(const RankSampleSet& set, const AlphaRank& target, double tol);

}  // namespace egta

#endif  // EGTA_RANK_BELIEF_HPP
