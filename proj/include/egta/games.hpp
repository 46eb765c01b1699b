#ifndef EGTA_GAMES_HPP
#define EGTA_GAMES_HPP

#include <Eigen/Dense>

#include "egta/payoff_tensor.hpp"
#include "egta/rng.hpp"

namespace egta {

// A synthetic game: ground-truth payoff matrix plus a stochastic observation
// model. Environments are immutable; observation randomness comes from the
// caller's stream.
struct GameEnv {
  enum class Noise { bernoulli, clipped_gaussian };

  PayoffTensor ground_truth;
  Noise noise = Noise::bernoulli;
  double gauss_sd = 1.0;
  double clip_radius = 1.0;

  int side() const { return ground_truth.side(); }
};

// Good/Bad win-rate game: good agents beat bad agents with probability 1,
// bad-vs-bad and diagonal entries are 0.5, and within the good block the
// higher-index agent wins with probability p_top, so the last good agent is
// the strict best. Bernoulli observations.
GameEnv good_bad_game(int n_good, int n_bad, double p_top);

// s x s game with entries drawn uniformly from [0, 1); observations are
// N(x, 1) clipped to within 1 of the true entry.
GameEnv gaussian_game(int s, RngKey key);

// Wrap an explicit matrix with an observation model.
GameEnv matrix_game(const Eigen::MatrixXd& m, GameEnv::Noise noise);

// One stochastic observation of the given entry (row-major index).
double observe(const GameEnv& env, int entry, Rng& rng);

// Minimum absolute gap between distinct ground-truth entries; 0 if any two
// entries tie exactly.
double separability(const GameEnv& env);

}  // namespace egta

#endif  // EGTA_GAMES_HPP
