#include "egta/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>

namespace egta {

namespace detail {

double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma requires x > 0");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series in 1/x^2.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result +=
      std::log(x) - 0.5 * inv -
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
  return result;
}

double plugin_entropy(const std::vector<long long>& counts) {
  long long total = 0;
  for (long long c : counts) total += c;
  if (total <= 0) throw std::invalid_argument("empty histogram");
  double h = 0.0;
  for (long long c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

}  // namespace detail

namespace {

using detail::digamma;

// Histogram over two-decimal rounding; coordinates of simplex points round
// into [0, 100], so one byte per coordinate keys the bins.
std::vector<long long> atom_counts_2dp(const RankSampleSet& set) {
  if (set.samples.empty()) throw std::invalid_argument("empty rank sample set");
  std::unordered_map<std::string, long long> hist;
  std::string key;
  for (const auto& s : set.samples) {
    key.clear();
    for (int i = 0; i < s.size(); ++i)
      key.push_back(static_cast<char>(std::llround(s(i) * 100.0)));
    hist[key] += 1;
  }
  std::vector<long long> counts;
  counts.reserve(hist.size());
  for (const auto& [k, count] : hist) counts.push_back(count);
  return counts;
}

std::vector<long long> atom_counts_exact(const RankSampleSet& set) {
  std::map<std::vector<double>, long long> groups;
  for (const auto& s : set.samples) {
    std::vector<double> key(s.data(), s.data() + s.size());
    groups[key] += 1;
  }
  std::vector<long long> counts;
  counts.reserve(groups.size());
  for (const auto& [key, count] : groups) counts.push_back(count);
  return counts;
}

// ---------------------------------------------------------------------------
// NSB machinery. The estimator integrates the Dirichlet posterior mean
// entropy over the concentration parameter beta, with the NSB prior that is
// flat in xi(beta) = psi(K beta + 1) - psi(beta + 1). Integration runs over
// xi on (0, log K); beta(xi) is recovered by bisection in log beta.

struct NsbProblem {
  double k = 0.0;   // alphabet size
  double n = 0.0;   // total samples
  // distinct count values with multiplicities, over observed atoms only
  std::vector<std::pair<long long, long long>> count_groups;
  long long observed_atoms = 0;

  double xi(double beta) const { return digamma(k * beta + 1.0) - digamma(beta + 1.0); }

  double beta_for_xi(double target) const {
    double lo = -46.0, hi = 46.0;  // log beta range
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (xi(std::exp(mid)) < target)
        lo = mid;
      else
        hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
  }

  // log evidence of the counts under a symmetric Dirichlet(beta) prior,
  // dropping beta-independent factors. Differences of lgamma lose all
  // precision once the arguments are huge, so for large beta the ratios are
  // expanded into explicit log sums (the counts are integers).
  double log_evidence(double beta) const {
    constexpr double kBig = 1e8;
    double value;
    const double kb = k * beta;
    if (kb < kBig) {
      value = std::lgamma(kb) - std::lgamma(n + kb);
    } else {
      value = 0.0;
      const long long total = static_cast<long long>(std::llround(n));
      for (long long i = 0; i < total; ++i) value -= std::log(kb + static_cast<double>(i));
    }
    for (const auto& [count, mult] : count_groups) {
      if (beta < kBig) {
        value += static_cast<double>(mult) *
                 (std::lgamma(static_cast<double>(count) + beta) - std::lgamma(beta));
      } else {
        double sum = 0.0;
        for (long long i = 0; i < count; ++i) sum += std::log(beta + static_cast<double>(i));
        value += static_cast<double>(mult) * sum;
      }
    }
    return value;
  }

  // Posterior mean entropy of the Dirichlet(counts + beta) distribution.
  double mean_entropy(double beta) const {
    const double total = n + k * beta;
    double acc = (k - static_cast<double>(observed_atoms)) * beta * digamma(beta + 1.0);
    for (const auto& [count, mult] : count_groups) {
      const double a = static_cast<double>(count) + beta;
      acc += static_cast<double>(mult) * a * digamma(a + 1.0);
    }
    return digamma(total + 1.0) - acc / total;
  }
};

struct NsbIntegrand {
  const NsbProblem* problem;
  double log_ref;

  // returns (weight, weight * entropy) at xi
  std::pair<double, double> operator()(double xi) const {
    const double beta = problem->beta_for_xi(xi);
    const double w = std::exp(problem->log_evidence(beta) - log_ref);
    return {w, w * problem->mean_entropy(beta)};
  }
};

struct Quad2 {
  double w = 0.0;
  double ws = 0.0;
};

Quad2 simpson(const std::pair<double, double>& fa, const std::pair<double, double>& fm,
              const std::pair<double, double>& fb, double h) {
  Quad2 q;
  q.w = h / 6.0 * (fa.first + 4.0 * fm.first + fb.first);
  q.ws = h / 6.0 * (fa.second + 4.0 * fm.second + fb.second);
  return q;
}

void adaptive_simpson(const NsbIntegrand& f, double a, double b,
                      const std::pair<double, double>& fa, const std::pair<double, double>& fb,
                      const std::pair<double, double>& fm, const Quad2& whole, double tol,
                      double width_floor, int depth, Quad2& acc, long long& evals) {
  const double m = 0.5 * (a + b);
  const auto fl = f(0.5 * (a + m));
  const auto fr = f(0.5 * (m + b));
  evals += 2;
  if (evals > 200000) throw QuadratureError("NSB quadrature exceeded evaluation budget", 0.0);
  const Quad2 left = simpson(fa, fl, fm, m - a);
  const Quad2 right = simpson(fm, fr, fb, b - m);
  const double err_w = std::abs(left.w + right.w - whole.w);
  const double err_ws = std::abs(left.ws + right.ws - whole.ws);
  if (depth <= 0 || b - a < width_floor || (err_w <= tol && err_ws <= tol)) {
    acc.w += left.w + right.w;
    acc.ws += left.ws + right.ws;
    return;
  }
  adaptive_simpson(f, a, m, fa, fm, fl, left, tol / 2.0, width_floor, depth - 1, acc, evals);
  adaptive_simpson(f, m, b, fm, fb, fr, right, tol / 2.0, width_floor, depth - 1, acc, evals);
}

// ---------------------------------------------------------------------------
// Exact min-cost flow (successive shortest paths with potentials) for the
// collapsed transportation problem.

class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : head_(nodes, -1), nodes_(nodes) {}

  void add_edge(int from, int to, long long cap, double cost) {
    edges_.push_back({to, head_[from], cap, cost});
    head_[from] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0, -cost});
    head_[to] = static_cast<int>(edges_.size()) - 1;
  }

  // Returns total cost of the max flow from s to t.
  double run(int s, int t) {
    std::vector<double> potential(nodes_, 0.0);
    double total_cost = 0.0;
    while (true) {
      std::vector<double> dist(nodes_, std::numeric_limits<double>::infinity());
      std::vector<int> parent_edge(nodes_, -1);
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
      dist[s] = 0.0;
      heap.push({0.0, s});
      while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u] + 1e-15) continue;
        for (int e = head_[u]; e != -1; e = edges_[e].next) {
          if (edges_[e].cap <= 0) continue;
          const int v = edges_[e].to;
          const double nd = d + edges_[e].cost + potential[u] - potential[v];
          if (nd < dist[v] - 1e-15) {
            dist[v] = nd;
            parent_edge[v] = e;
            heap.push({nd, v});
          }
        }
      }
      if (parent_edge[t] == -1) break;
      for (int v = 0; v < nodes_; ++v)
        if (std::isfinite(dist[v])) potential[v] += dist[v];
      long long push = std::numeric_limits<long long>::max();
      for (int v = t; v != s;) {
        const int e = parent_edge[v];
        push = std::min(push, edges_[e].cap);
        v = edges_[e ^ 1].to;
      }
      for (int v = t; v != s;) {
        const int e = parent_edge[v];
        edges_[e].cap -= push;
        edges_[e ^ 1].cap += push;
        total_cost += static_cast<double>(push) * edges_[e].cost;
        v = edges_[e ^ 1].to;
      }
    }
    return total_cost;
  }

 private:
  struct Edge {
    int to;
    int next;
    long long cap;
    double cost;
  };
  std::vector<Edge> edges_;
  std::vector<int> head_;
  int nodes_;
};

}  // namespace

EntropyEstimate entropy_binning(const RankSampleSet& set) {
  EntropyEstimate est;
  est.kind = EntropyKind::binning;
  est.value = detail::plugin_entropy(atom_counts_2dp(set));
  return est;
}

double nsb_entropy_from_counts(const std::vector<long long>& counts, double atom_bound) {
  NsbProblem problem;
  problem.observed_atoms = static_cast<long long>(counts.size());
  if (!(atom_bound >= static_cast<double>(problem.observed_atoms)))
    throw std::invalid_argument("atom bound must cover the observed atoms");
  problem.k = atom_bound;
  long long total = 0;
  std::map<long long, long long> groups;
  for (long long c : counts) {
    if (c <= 0) throw std::invalid_argument("atom counts must be positive");
    total += c;
    groups[c] += 1;
  }
  problem.n = static_cast<double>(total);
  problem.count_groups.assign(groups.begin(), groups.end());

  if (problem.k < 1.5) return 0.0;  // single-atom alphabet is deterministic

  const double xi_max = std::log(problem.k);
  const double a = xi_max * 1e-9;
  const double b = xi_max * (1.0 - 1e-12);

  // Reference scale for the evidence, from a coarse scan.
  double log_ref = -std::numeric_limits<double>::infinity();
  constexpr int kScan = 64;
  for (int i = 0; i <= kScan; ++i) {
    const double xi = a + (b - a) * i / kScan;
    log_ref = std::max(log_ref, problem.log_evidence(problem.beta_for_xi(xi)));
  }
  if (!std::isfinite(log_ref)) throw QuadratureError("NSB evidence is degenerate", 0.0);

  const NsbIntegrand f{&problem, log_ref};
  const auto fa = f(a);
  const auto fb = f(b);
  const auto fm = f(0.5 * (a + b));
  const Quad2 whole = simpson(fa, fm, fb, b - a);
  Quad2 acc;
  long long evals = 3;
  const double tol = 1e-6 * std::max(1.0, std::abs(whole.ws) + std::abs(whole.w));
  try {
    adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, (b - a) * 1e-10, 48, acc, evals);
  } catch (const QuadratureError&) {
    throw QuadratureError("NSB quadrature did not converge", detail::plugin_entropy(counts));
  }
  if (!(acc.w > 0.0) || !std::isfinite(acc.ws))
    throw QuadratureError("NSB quadrature produced a degenerate weight",
                          detail::plugin_entropy(counts));
  return acc.ws / acc.w;
}

EntropyEstimate entropy_nsb(const RankSampleSet& set, double atom_bound) {
  EntropyEstimate est;
  est.kind = EntropyKind::nsb;
  est.atom_bound_used = atom_bound;
  est.value = nsb_entropy_from_counts(atom_counts_exact(set), atom_bound);
  return est;
}

double RankCountBound::as_double() const {
  if (exponent2 > 1023) return std::numeric_limits<double>::infinity();
  return std::ldexp(1.0, static_cast<int>(exponent2));
}

RankCountBound rank_count_upper_bound(int num_populations, int strategies) {
  if (num_populations < 1 || strategies < 1)
    throw std::invalid_argument("populations and strategies must be positive");
  RankCountBound bound;
  // exponent = S^k * k * (S - 1), saturating well above anything printable
  double exponent = std::pow(static_cast<double>(strategies), num_populations) *
                    static_cast<double>(num_populations) * (strategies - 1);
  if (exponent > 1e15) {
    bound.exponent2 = static_cast<long long>(1e15);
    bound.representable = false;
    return bound;
  }
  bound.exponent2 = static_cast<long long>(std::llround(exponent));
  bound.representable = bound.exponent2 <= 62;
  if (bound.representable) bound.value = 1ULL << bound.exponent2;
  return bound;
}

namespace detail {

WeightedAtoms collapse_atoms(const RankSampleSet& set) {
  if (set.samples.empty()) throw std::invalid_argument("empty rank sample set");
  WeightedAtoms atoms;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& s : set.samples) {
    std::string key(reinterpret_cast<const char*>(s.data()),
                    static_cast<std::size_t>(s.size()) * sizeof(double));
    auto [it, inserted] = index.emplace(std::move(key), atoms.points.size());
    if (inserted) {
      atoms.points.push_back(s);
      atoms.weights.push_back(1);
    } else {
      atoms.weights[it->second] += 1;
    }
    atoms.total += 1;
  }
  return atoms;
}

double wasserstein_tv_atoms(const WeightedAtoms& p, const WeightedAtoms& q) {
  if (p.points.empty() || q.points.empty())
    throw std::invalid_argument("empty rank sample set");
  if (p.points.front().size() != q.points.front().size())
    throw std::invalid_argument("sample dimensions do not match");

  auto tv = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return 0.5 * (x - y).cwiseAbs().sum();
  };
  if (p.points.size() == 1 && q.points.size() == 1) return tv(p.points[0], q.points[0]);

  const int k = static_cast<int>(p.points.size());
  const int l = static_cast<int>(q.points.size());
  const int source = 0;
  const int sink = k + l + 1;
  MinCostFlow flow(k + l + 2);
  for (int i = 0; i < k; ++i) flow.add_edge(source, 1 + i, p.weights[i] * q.total, 0.0);
  for (int j = 0; j < l; ++j) flow.add_edge(1 + k + j, sink, q.weights[j] * p.total, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < l; ++j)
      flow.add_edge(1 + i, 1 + k + j, std::numeric_limits<long long>::max() / 4,
                    tv(p.points[i], q.points[j]));

  const double cost = flow.run(source, sink);
  return cost / (static_cast<double>(p.total) * static_cast<double>(q.total));
}

}  // namespace detail

double wasserstein_tv(const RankSampleSet& p, const RankSampleSet& q) {
  return detail::wasserstein_tv_atoms(detail::collapse_atoms(p), detail::collapse_atoms(q));
}

}  // namespace egta
