#include "egta/belief.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace egta {

namespace {

constexpr double kPsdSlack = 1e-8;

int block_of(int x, int y, int n_good) {
  if (x < n_good && y < n_good) return 1;
  if (x < n_good) return 2;
  if (y < n_good) return 3;
  return 4;
}

}  // namespace

KernelSpec KernelSpec::independent(double mean0, double sigma0_sq) {
  if (!(sigma0_sq > 0.0)) throw std::invalid_argument("prior variance must be positive");
  KernelSpec spec;
  spec.kind = Kind::independent;
  spec.mean0 = mean0;
  spec.sigma0_sq = sigma0_sq;
  return spec;
}

KernelSpec KernelSpec::block_antisymmetric(int n_good, int n_bad, double scale_divisor) {
  if (n_good < 1 || n_bad < 0) throw std::invalid_argument("invalid block sizes");
  if (!(scale_divisor > 0.0)) throw std::invalid_argument("scale divisor must be positive");
  KernelSpec spec;
  spec.kind = Kind::block_antisymmetric;
  spec.n_good = n_good;
  spec.n_bad = n_bad;
  spec.scale_divisor = scale_divisor;
  spec.mean0 = 0.5;
  return spec;
}

int KernelSpec::entry_count_hint() const {
  if (kind != Kind::block_antisymmetric) return 0;
  const int s = n_good + n_bad;
  return s * s;
}

std::string KernelSpec::kind_name() const {
  return kind == Kind::independent ? "independent" : "block_antisymmetric";
}

GaussianBelief::GaussianBelief(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                               double obs_noise_var)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), obs_noise_var_(obs_noise_var) {
  if (!(obs_noise_var_ > 0.0)) throw std::invalid_argument("observation noise must be positive");
  if (covariance_.rows() != covariance_.cols() || covariance_.rows() != mean_.size())
    throw std::invalid_argument("belief dimensions do not match");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("covariance must be symmetric");
  diagonal_ = true;
  for (int i = 0; i < covariance_.rows() && diagonal_; ++i)
    for (int j = 0; j < covariance_.cols(); ++j)
      if (i != j && covariance_(i, j) != 0.0) {
        diagonal_ = false;
        break;
      }
}

GaussianBelief GaussianBelief::prior(const KernelSpec& spec, int entry_count,
                                     double obs_noise_var) {
  if (entry_count < 1) throw std::invalid_argument("entry count must be positive");
  if (spec.kind == KernelSpec::Kind::independent) {
    return GaussianBelief(Eigen::VectorXd::Constant(entry_count, spec.mean0),
                          Eigen::MatrixXd::Identity(entry_count, entry_count) * spec.sigma0_sq,
                          obs_noise_var);
  }

  const int s = spec.n_good + spec.n_bad;
  const int e = s * s;
  if (entry_count != e)
    throw std::invalid_argument("entry count does not match the block partition");

  // Base kernel: within-block equality for blocks 2..4, independent entries
  // inside the good-vs-good block, no coupling across blocks.
  auto base = [&](int a, int b) -> double {
    if (a == b) return 1.0;
    const int ba = block_of(a / s, a % s, spec.n_good);
    const int bb = block_of(b / s, b % s, spec.n_good);
    if (ba == bb && ba != 1) return 1.0;
    return 0.0;
  };
  auto transpose_entry = [&](int a) { return (a % s) * s + (a / s); };

  Eigen::MatrixXd kp(e, e);
  for (int a = 0; a < e; ++a) {
    const int at = transpose_entry(a);
    for (int b = 0; b < e; ++b) {
      const int bt = transpose_entry(b);
      kp(a, b) = base(a, b) + base(at, bt) - base(a, bt) - base(at, b);
    }
  }
  Eigen::MatrixXd cov = (kp.transpose() * kp) / spec.scale_divisor;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.eigenvalues().minCoeff() < -kPsdSlack)
    throw std::runtime_error("block kernel covariance is not positive semidefinite");

  return GaussianBelief(Eigen::VectorXd::Constant(e, spec.mean0), std::move(cov), obs_noise_var);
}

double GaussianBelief::marginal_variance(int entry) const {
  if (entry < 0 || entry >= size()) throw std::out_of_range("entry index out of range");
  return std::max(0.0, covariance_(entry, entry));
}

GaussianBelief GaussianBelief::condition(int entry, double observation) const {
  if (entry < 0 || entry >= size()) throw std::out_of_range("entry index out of range");
  if (!std::isfinite(observation)) throw std::invalid_argument("observation must be finite");

  GaussianBelief out = *this;
  const double var = std::max(0.0, covariance_(entry, entry));
  const double s = var + obs_noise_var_;
  const double gain = (observation - mean_(entry)) / s;
  if (diagonal_) {
    out.mean_(entry) += var * gain;
    out.covariance_(entry, entry) = var - var * var / s;
  } else {
    const Eigen::VectorXd k = covariance_.col(entry);
    out.mean_ += k * gain;
    out.covariance_ -= (k * k.transpose()) / s;
  }
  return out;
}

GaussianBelief GaussianBelief::condition_repeated(int entry, double observation, int times) const {
  if (times < 1) throw std::invalid_argument("times must be >= 1");
  GaussianBelief out = condition(entry, observation);
  for (int i = 1; i < times; ++i) out = out.condition(entry, observation);
  return out;
}

double GaussianBelief::hallucinate_observation(int entry, Rng& rng) const {
  const double var = marginal_variance(entry) + obs_noise_var_;
  return mean_(entry) + std::sqrt(var) * rng.normal();
}

Eigen::VectorXd GaussianBelief::sample_entries(Rng& rng) const {
  return BeliefSampler(*this).draw(rng);
}

PayoffTensor GaussianBelief::sample_payoff(Rng& rng) const {
  const int s = side();
  const Eigen::VectorXd x = sample_entries(rng);
  Eigen::MatrixXd m(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m(i, j) = x(i * s + j);
  return PayoffTensor::from_matrix(m);
}

PayoffTensor GaussianBelief::posterior_mean() const {
  const int s = side();
  Eigen::MatrixXd m(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) m(i, j) = mean_(i * s + j);
  return PayoffTensor::from_matrix(m);
}

int GaussianBelief::side() const {
  const int s = static_cast<int>(std::llround(std::sqrt(static_cast<double>(size()))));
  if (s * s != size())
    throw std::logic_error("belief entry count is not a square payoff matrix");
  return s;
}

BeliefSampler::BeliefSampler(const GaussianBelief& belief) : belief_(&belief) {
  const Eigen::MatrixXd& cov = belief.covariance();
  const int n = belief.size();
  if (cov.cwiseAbs().maxCoeff() == 0.0) {
    zero_ = true;
    return;
  }
  if (belief.diagonal()) {
    diagonal_ = true;
    sd_ = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -kPsdSlack)
    throw std::runtime_error("covariance factorization failed");
  const Eigen::VectorXd& values = es.eigenvalues();
  const double floor = values.maxCoeff() * 1e-14;
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (values(i) > floor) ++rank;
  factor_.resize(n, rank);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (values(i) <= floor) continue;
    factor_.col(col++) = es.eigenvectors().col(i) * std::sqrt(values(i));
  }
  z_.resize(rank);
}

Eigen::VectorXd BeliefSampler::draw(Rng& rng) const {
  Eigen::VectorXd out;
  draw_into(rng, out);
  return out;
}

void BeliefSampler::draw_into(Rng& rng, Eigen::VectorXd& out) const {
  if (zero_) {
    out = belief_->mean();
    return;
  }
  const int n = belief_->size();
  if (diagonal_) {
    out = belief_->mean();
    for (int i = 0; i < n; ++i) out(i) += sd_(i) * rng.normal();
    return;
  }
  for (int i = 0; i < z_.size(); ++i) z_(i) = rng.normal();
  out = belief_->mean();
  out.noalias() += factor_ * z_;
}

}  // namespace egta
