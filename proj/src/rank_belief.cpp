#include "egta/rank_belief.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

namespace egta {

namespace {

void pattern_from_entries(const Eigen::VectorXd& x, int side, OrderPattern& pattern) {
  pattern.clear();
  for (int i = 0; i < side; ++i) {
    for (int j = i + 1; j < side; ++j) {
      const double a = x(j * side + i);
      const double b = x(i * side + j);
      pattern.push_back(a > b ? 2 : (a < b ? 0 : 1));
    }
  }
}

const Eigen::VectorXd& rank_of_pattern(const OrderPattern& pattern, int side, double epsilon,
                                       RankCache* cache, Eigen::VectorXd& scratch) {
  if (cache != nullptr) {
    if (cache->epsilon() != epsilon)
      throw std::logic_error("rank cache epsilon does not match request");
    return cache->rank(pattern, side);
  }
  scratch = stationary_distribution(transition_from_pattern(pattern, side, epsilon)).p;
  return scratch;
}

// One pattern draw under the given belief. Diagonal covariances admit a
// shortcut: each pair comparison depends on the difference of two
// independent entries, itself a single Gaussian.
struct PatternDrawer {
  const GaussianBelief* belief;
  const BeliefSampler* sampler;  // null on the diagonal fast path
  int side = 0;
  std::vector<double> pair_mean_diff;
  std::vector<double> pair_sd;
  Eigen::VectorXd scratch;

  PatternDrawer(const GaussianBelief& b, const BeliefSampler* s) : belief(&b), sampler(s) {
    side = b.side();
    if (sampler != nullptr) return;
    for (int i = 0; i < side; ++i) {
      for (int j = i + 1; j < side; ++j) {
        const int e_ji = j * side + i;
        const int e_ij = i * side + j;
        pair_mean_diff.push_back(b.mean()(e_ji) - b.mean()(e_ij));
        pair_sd.push_back(std::sqrt(b.marginal_variance(e_ji) + b.marginal_variance(e_ij)));
      }
    }
  }

  void draw(Rng& rng, OrderPattern& pattern) {
    if (sampler == nullptr) {
      pattern.clear();
      for (std::size_t p = 0; p < pair_mean_diff.size(); ++p) {
        const double d =
            pair_sd[p] == 0.0 ? pair_mean_diff[p] : pair_mean_diff[p] + pair_sd[p] * rng.normal();
        pattern.push_back(d > 0.0 ? 2 : (d < 0.0 ? 0 : 1));
      }
      return;
    }
    sampler->draw_into(rng, scratch);
    pattern_from_entries(scratch, side, pattern);
  }
};

std::vector<long long> rounded_key(const Eigen::VectorXd& v, double scale) {
  std::vector<long long> key(static_cast<std::size_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) key[static_cast<std::size_t>(i)] = std::llround(v(i) * scale);
  return key;
}

}  // namespace

RankSampleSet sample_ranks_with(const std::function<Eigen::MatrixXd(Rng&)>& draw, int side, int n,
                                double epsilon, RankCache* cache, RngKey key) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  RankSampleSet set;
  set.epsilon_used = epsilon;
  set.samples.reserve(static_cast<std::size_t>(n));
  OrderPattern pattern;
  Eigen::VectorXd scratch;
  for (int i = 0; i < n; ++i) {
    try {
      Rng rng(key.child(static_cast<std::uint64_t>(i)));
      pattern = ordering_pattern(draw(rng));
      set.samples.push_back(rank_of_pattern(pattern, side, epsilon, cache, scratch));
    } catch (const SolverError&) {
      // One retry on a fresh substream, then the failure propagates.
      Rng rng(key.child(static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i)));
      pattern = ordering_pattern(draw(rng));
      set.samples.push_back(rank_of_pattern(pattern, side, epsilon, cache, scratch));
    }
  }
  return set;
}

RankSampleSet sample_ranks(const GaussianBelief& belief, int n, double epsilon, RankCache* cache,
                           RngKey key) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const int side = belief.side();
  std::optional<BeliefSampler> sampler_storage;
  if (!belief.diagonal()) sampler_storage.emplace(belief);
  PatternDrawer drawer(belief, sampler_storage ? &*sampler_storage : nullptr);

  RankSampleSet set;
  set.epsilon_used = epsilon;
  set.samples.reserve(static_cast<std::size_t>(n));
  OrderPattern pattern;
  Eigen::VectorXd scratch;
  for (int i = 0; i < n; ++i) {
    try {
      Rng rng(key.child(static_cast<std::uint64_t>(i)));
      drawer.draw(rng, pattern);
      set.samples.push_back(rank_of_pattern(pattern, side, epsilon, cache, scratch));
    } catch (const SolverError&) {
      Rng rng(key.child(static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i)));
      drawer.draw(rng, pattern);
      set.samples.push_back(rank_of_pattern(pattern, side, epsilon, cache, scratch));
    }
  }
  return set;
}

std::vector<std::pair<Eigen::VectorXd, int>> aggregate(const RankSampleSet& set,
                                                       int decimal_places) {
  if (set.samples.empty()) throw std::invalid_argument("empty rank sample set");
  if (decimal_places < 1 || decimal_places > 9)
    throw std::invalid_argument("unsupported aggregation precision");
  const double scale = std::pow(10.0, decimal_places);

  std::map<std::vector<long long>, int> counts;
  for (const auto& s : set.samples) counts[rounded_key(s, scale)] += 1;

  std::vector<std::pair<Eigen::VectorXd, int>> out;
  out.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    Eigen::VectorXd atom(static_cast<int>(key.size()));
    for (std::size_t i = 0; i < key.size(); ++i)
      atom(static_cast<int>(i)) = static_cast<double>(key[i]) / scale;
    out.emplace_back(std::move(atom), count);
  }
  return out;
}

AlphaRank mode(const RankSampleSet& set) {
  auto atoms = aggregate(set, set.aggregation_precision);
  // aggregate returns atoms in lexicographic order, so the first maximal
  // count is already the lexicographically smallest winner.
  const std::pair<Eigen::VectorXd, int>* best = &atoms.front();
  for (const auto& atom : atoms)
    if (atom.second > best->second) best = &atom;
  return AlphaRank{best->first};
}

double prob_of(const RankSampleSet& set, const AlphaRank& target, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (set.samples.empty()) throw std::invalid_argument("empty rank sample set");
  long long hits = 0;
  for (const auto& s : set.samples) {
    if (s.size() != target.p.size())
      throw std::invalid_argument("target dimension does not match samples");
    if ((s - target.p).cwiseAbs().sum() < tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(set.samples.size());
}

}  // namespace egta
