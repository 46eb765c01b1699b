#include "egta/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace egta {

GameEnv good_bad_game(int n_good, int n_bad, double p_top) {
  if (n_good < 2) throw std::invalid_argument("need at least 2 good agents");
  if (n_bad < 1) throw std::invalid_argument("need at least 1 bad agent");
  if (!(p_top > 0.5 && p_top < 1.0)) throw std::invalid_argument("p_top must lie in (0.5, 1)");
  const int s = n_good + n_bad;
  Eigen::MatrixXd m(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (i == j) {
        m(i, j) = 0.5;
      } else if (i < n_good && j >= n_good) {
        m(i, j) = 1.0;  // good always beats bad
      } else if (i >= n_good && j < n_good) {
        m(i, j) = 0.0;
      } else if (i >= n_good && j >= n_good) {
        m(i, j) = 0.5;  // bad agents are evenly matched
      } else {
        m(i, j) = i > j ? p_top : 1.0 - p_top;
      }
    }
  }
  return GameEnv{PayoffTensor::from_matrix(m), GameEnv::Noise::bernoulli, 1.0, 1.0};
}

GameEnv gaussian_game(int s, RngKey key) {
  if (s < 2) throw std::invalid_argument("need at least 2 strategies");
  Rng rng(key);
  Eigen::MatrixXd m(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m(i, j) = rng.uniform();
  return GameEnv{PayoffTensor::from_matrix(m), GameEnv::Noise::clipped_gaussian, 1.0, 1.0};
}

GameEnv matrix_game(const Eigen::MatrixXd& m, GameEnv::Noise noise) {
  if (noise == GameEnv::Noise::bernoulli && (m.minCoeff() < 0.0 || m.maxCoeff() > 1.0))
    throw std::invalid_argument("Bernoulli games need entries in [0, 1]");
  return GameEnv{PayoffTensor::from_matrix(m), noise, 1.0, 1.0};
}

double observe(const GameEnv& env, int entry, Rng& rng) {
  const int s = env.side();
  if (entry < 0 || entry >= s * s) throw std::out_of_range("entry index out of range");
  const double x = env.ground_truth.at(entry / s, entry % s);
  switch (env.noise) {
    case GameEnv::Noise::bernoulli:
      return rng.uniform() < x ? 1.0 : 0.0;
    case GameEnv::Noise::clipped_gaussian: {
      const double eps = env.gauss_sd * rng.normal();
      return x + std::clamp(eps, -env.clip_radius, env.clip_radius);
    }
  }
  throw std::logic_error("unknown observation model");
}

double separability(const GameEnv& env) {
  const Eigen::MatrixXd m = env.ground_truth.matrix();
  std::vector<double> values(m.data(), m.data() + m.size());
  std::sort(values.begin(), values.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < values.size(); ++i) best = std::min(best, values[i] - values[i - 1]);
  return values.size() < 2 ? 0.0 : best;
}

}  // namespace egta
