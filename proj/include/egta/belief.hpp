#ifndef EGTA_BELIEF_HPP
#define EGTA_BELIEF_HPP

#include <Eigen/Dense>
#include <string>

#include "egta/payoff_tensor.hpp"
#include "egta/rng.hpp"

namespace egta {

// Prior family for the Gaussian payoff belief.
//
// independent: entries are i.i.d. N(mean0, sigma0_sq).
//
// block_antisymmetric: the Good/Bad prior. Entries are partitioned into four
// blocks by whether row/column index a good agent; a base kernel encodes
// equality of entries within the good-vs-bad, bad-vs-good and bad-vs-bad
// blocks (good-vs-good entries stay independent), an antisymmetrization step
// k'(s,t) = k(s,t) + k(s^T,t^T) - k(s,t^T) - k(s^T,t) encodes
// M(s) = 1 - M(s^T) about mean 0.5, and the covariance is the Gram matrix
// (k')^T (k') divided by scale_divisor.
struct KernelSpec {
  enum class Kind { independent, block_antisymmetric };

  Kind kind = Kind::independent;
  double mean0 = 0.5;
  double sigma0_sq = 1.0;
  int n_good = 0;
  int n_bad = 0;
  double scale_divisor = 500.0;

  static KernelSpec independent(double mean0, double sigma0_sq);
  static KernelSpec block_antisymmetric(int n_good, int n_bad, double scale_divisor = 500.0);

  int entry_count_hint() const;  // block kernel implies (n_good + n_bad)^2; 0 otherwise
  std::string kind_name() const;
};

// Gaussian epistemic belief over payoff entries: mean vector, full covariance
// and the aleatoric observation-noise variance sigma_A^2. Immutable value
// type; conditioning returns a new belief.
class GaussianBelief {
 public:
  GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double obs_noise_var);

  static GaussianBelief prior(const KernelSpec& spec, int entry_count, double obs_noise_var);

  int size() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  double obs_noise_var() const { return obs_noise_var_; }
  bool diagonal() const { return diagonal_; }
  double marginal_variance(int entry) const;

  GaussianBelief condition(int entry, double observation) const;
  GaussianBelief condition_repeated(int entry, double observation, int times) const;

  // One draw from the predictive distribution of the noisy entry:
  // N(mean_e, marginal variance + sigma_A^2).
  double hallucinate_observation(int entry, Rng& rng) const;

  // One joint draw of all entries. Factors the covariance per call; use
  // BeliefSampler for bulk draws.
  Eigen::VectorXd sample_entries(Rng& rng) const;
  PayoffTensor sample_payoff(Rng& rng) const;

  PayoffTensor posterior_mean() const;

  // Side length when the entries form a square payoff matrix.
  int side() const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  double obs_noise_var_;
  bool diagonal_;

  friend class BeliefSampler;
};

// Factors a belief's covariance once and then produces i.i.d. joint draws.
// Diagonal covariances use per-entry standard deviations; general ones use a
// rank-truncated eigenvalue factor, so rank-deficient structured kernels
// consume only rank-many normal draws per sample.
class BeliefSampler {
 public:
  explicit BeliefSampler(const GaussianBelief& belief);

  Eigen::VectorXd draw(Rng& rng) const;
  void draw_into(Rng& rng, Eigen::VectorXd& out) const;
  const GaussianBelief& belief() const { return *belief_; }

 private:
  const GaussianBelief* belief_;
  Eigen::MatrixXd factor_;  // n x rank eigen factor, unused on fast paths
  Eigen::VectorXd sd_;      // diagonal fast path
  bool diagonal_ = false;
  bool zero_ = false;
  mutable Eigen::VectorXd z_;  // scratch for the factor path
};

}  // namespace egta

#endif  // EGTA_BELIEF_HPP
