#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "egta/estimators.hpp"
#include "egta/rng.hpp"

using namespace egta;

namespace {

RankSampleSet set_from(const std::vector<std::vector<double>>& vs) {
  RankSampleSet set;
  for (const auto& v : vs) {
    Eigen::VectorXd x(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<int>(i)) = v[i];
    set.samples.push_back(x);
  }
  return set;
}

// Simplex corner helper.
std::vector<double> corner(int dim, int at) {
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  v[static_cast<std::size_t>(at)] = 1.0;
  return v;
}

// Brute-force optimal assignment between two equally sized sample lists.
double assignment_oracle(const RankSampleSet& p, const RankSampleSet& q) {
  const int n = p.count();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i)
      cost += 0.5 * (p.samples[static_cast<std::size_t>(i)] -
                     q.samples[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])])
                        .cwiseAbs()
                        .sum();
    best = std::min(best, cost / n);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

RankSampleSet random_simplex_set(int n, int dim, std::uint64_t seed) {
  Rng rng(RngKey::root(seed));
  std::vector<std::vector<double>> samples;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double sum = 0.0;
    for (auto& x : v) {
      x = -std::log(1.0 - rng.uniform());
      sum += x;
    }
    for (auto& x : v) x /= sum;
    samples.push_back(std::move(v));
  }
  return set_from(samples);
}

}  // namespace

TEST_CASE("digamma against known values") {
  constexpr double kEulerGamma = 0.5772156649015329;
  CHECK(detail::digamma(1.0) == doctest::Approx(-kEulerGamma).epsilon(1e-12));
  CHECK(detail::digamma(2.0) == doctest::Approx(1.0 - kEulerGamma).epsilon(1e-12));
  CHECK(detail::digamma(0.5) == doctest::Approx(-kEulerGamma - 2.0 * std::log(2.0)).epsilon(1e-12));
  // psi(10.5) from tabulated references
  CHECK(detail::digamma(10.5) == doctest::Approx(2.303001034297686).epsilon(1e-9));
}

TEST_CASE("binning entropy of a single atom is zero") {
  RankSampleSet set = set_from({{0.0, 1.0}, {0.0, 1.0}, {1e-7, 1.0 - 1e-7}});
  CHECK(entropy_binning(set).value == 0.0);
}

TEST_CASE("binning entropy of four equal atoms is log 4") {
  std::vector<std::vector<double>> samples;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 25; ++i) samples.push_back(corner(4, k));
  const EntropyEstimate est = entropy_binning(set_from(samples));
  CHECK(est.value == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("binning entropy equals an independent histogram computation") {
  const RankSampleSet set = random_simplex_set(400, 3, 21);
  std::map<std::vector<long long>, long long> hist;
  for (const auto& s : set.samples) {
    std::vector<long long> key;
    for (int i = 0; i < s.size(); ++i) key.push_back(std::llround(s(i) * 100.0));
    hist[key] += 1;
  }
  double expected = 0.0;
  for (const auto& [key, count] : hist) {
    const double p = static_cast<double>(count) / set.count();
    expected -= p * std::log(p);
  }
  CHECK(entropy_binning(set).value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("binning entropy is sample-order invariant") {
  RankSampleSet set = random_simplex_set(100, 3, 22);
  RankSampleSet shuffled = set;
  std::reverse(shuffled.samples.begin(), shuffled.samples.end());
  CHECK(entropy_binning(set).value == entropy_binning(shuffled).value);
}

TEST_CASE("NSB stays within the alphabet range on degenerate data") {
  std::vector<std::vector<double>> samples(1000, corner(4, 1));
  const EntropyEstimate est = entropy_nsb(set_from(samples), 4096.0);
  CHECK(est.value >= 0.0);
  CHECK(est.value <= std::log(4096.0));
  CHECK(est.atom_bound_used == 4096.0);
}

TEST_CASE("NSB is consistent on a known 3-atom distribution") {
  // atoms with probabilities 0.6 / 0.3 / 0.1
  Rng rng(RngKey::root(31));
  std::vector<std::vector<double>> samples;
  const double true_entropy = -(0.6 * std::log(0.6) + 0.3 * std::log(0.3) + 0.1 * std::log(0.1));
  for (int i = 0; i < 50000; ++i) {
    const double u = rng.uniform();
    samples.push_back(corner(3, u < 0.6 ? 0 : (u < 0.9 ? 1 : 2)));
  }
  const EntropyEstimate est = entropy_nsb(set_from(samples), 4096.0);
  CHECK(std::abs(est.value - true_entropy) < 0.02);
}

TEST_CASE("NSB corrects the plug-in downward bias on small samples") {
  int nsb_wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(RngKey::root(4000 + trial));
    std::vector<std::vector<double>> samples;
    for (int i = 0; i < 20; ++i) samples.push_back(corner(10, rng.uniform_int(10)));
    const RankSampleSet set = set_from(samples);
    const double plugin = entropy_binning(set).value;
    const double nsb = entropy_nsb(set, 10.0).value;
    if (nsb >= plugin) ++nsb_wins;
  }
  CHECK(nsb_wins > 50);
}

TEST_CASE("NSB validates the atom bound") {
  RankSampleSet set = set_from({corner(3, 0), corner(3, 1)});
  CHECK_THROWS_AS(entropy_nsb(set, 1.0), std::invalid_argument);
}

TEST_CASE("rank count upper bound substitutions") {
  CHECK(rank_count_upper_bound(1, 4).value == 4096ULL);
  CHECK(rank_count_upper_bound(1, 2).value == 4ULL);
  CHECK(rank_count_upper_bound(2, 2).value == 256ULL);
  for (int s = 2; s <= 7; ++s) {
    const RankCountBound b = rank_count_upper_bound(1, s);
    CHECK(b.exponent2 == static_cast<long long>(s) * (s - 1));
  }
  // beyond 2^62 only the exponent is reported
  const RankCountBound big = rank_count_upper_bound(1, 9);
  CHECK(big.exponent2 == 72);
  CHECK_FALSE(big.representable);
}

TEST_CASE("wasserstein distance between identical sets is zero") {
  const RankSampleSet set = random_simplex_set(40, 4, 41);
  CHECK(wasserstein_tv(set, set) == 0.0);
}

TEST_CASE("wasserstein distance between opposite corners is one") {
  RankSampleSet p = set_from({{1.0, 0.0}, {1.0, 0.0}});
  RankSampleSet q = set_from({{0.0, 1.0}, {0.0, 1.0}});
  CHECK(wasserstein_tv(p, q) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wasserstein matches brute-force assignment on 6 vs 6 sets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RankSampleSet p = random_simplex_set(6, 3, 600 + seed);
    const RankSampleSet q = random_simplex_set(6, 3, 700 + seed);
    CHECK(wasserstein_tv(p, q) == doctest::Approx(assignment_oracle(p, q)).epsilon(1e-9));
  }
}

TEST_CASE("wasserstein handles unequal sample counts") {
  RankSampleSet p = set_from({{1.0, 0.0}, {1.0, 0.0}});
  RankSampleSet q = set_from({{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}});
  // one third of q's mass sits on (1,0): move 2/3 across distance 1
  CHECK(wasserstein_tv(p, q) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("wasserstein is symmetric, bounded and satisfies the triangle inequality") {
  const RankSampleSet a = random_simplex_set(12, 3, 81);
  const RankSampleSet b = random_simplex_set(15, 3, 82);
  const RankSampleSet c = random_simplex_set(9, 3, 83);
  const double ab = wasserstein_tv(a, b);
  const double ba = wasserstein_tv(b, a);
  const double ac = wasserstein_tv(a, c);
  const double cb = wasserstein_tv(c, b);
  CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
  CHECK(ab >= 0.0);
  CHECK(ab <= 1.0);
  CHECK(ab <= ac + cb + 1e-9);
}

TEST_CASE("wasserstein collapses duplicate samples correctly") {
  // duplicating every sample should not change the distance
  const RankSampleSet p = random_simplex_set(5, 3, 91);
  const RankSampleSet q = random_simplex_set(5, 3, 92);
  RankSampleSet p2 = p;
  p2.samples.insert(p2.samples.end(), p.samples.begin(), p.samples.end());
  CHECK(wasserstein_tv(p2, q) == doctest::Approx(wasserstein_tv(p, q)).epsilon(1e-12));
}

TEST_CASE("wasserstein validates inputs") {
  RankSampleSet empty;
  RankSampleSet ok = set_from({{1.0, 0.0}});
  CHECK_THROWS_AS(wasserstein_tv(empty, ok), std::invalid_argument);
  RankSampleSet wrong_dim = set_from({{1.0, 0.0, 0.0}});
  CHECK_THROWS_AS(wasserstein_tv(ok, wrong_dim), std::invalid_argument);
}
