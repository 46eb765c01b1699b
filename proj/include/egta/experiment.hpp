#ifndef EGTA_EXPERIMENT_HPP
#define EGTA_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "egta/alpharank.hpp"
#include "egta/belief.hpp"
#include "egta/games.hpp"
#include "egta/rank_belief.hpp"
#include "egta/samplers.hpp"

namespace egta {

enum class SamplerKind {
  alpha_ig_binning,
  alpha_ig_nsb,
  alpha_wass,
  payoff_ig,
  uniform,
  rg_ucb,
};

std::string sampler_kind_name(SamplerKind kind);
SamplerKind sampler_kind_from_name(const std::string& name);

struct GameSpec {
  enum class Type { good_bad, gaussian, matrix };

  Type type = Type::good_bad;
  int n_good = 2;
  int n_bad = 2;
  double p_top = 0.55;
  int size = 4;  // gaussian games
  std::uint64_t seed = 0;
  GameEnv::Noise noise = GameEnv::Noise::bernoulli;
  std::vector<std::vector<double>> matrix;  // explicit matrix games

  GameEnv build() const;
  int side() const;
};

struct ExperimentConfig {
  std::string name;
  GameSpec game;
  SamplerKind sampler = SamplerKind::alpha_ig_binning;
  SamplerHyperparams hp;
  bool rg_prior_knowledge = false;
  KernelSpec kernel = KernelSpec::independent(0.5, 1.0);
  double obs_noise_var = 0.5;
  double epsilon = 1e-6;
  long long budget = 5000;
  int eval_points = 100;
  int eval_samples = 2000;
  std::vector<std::uint64_t> seeds = {1};

  // Parses a config document, starting from the per-game per-sampler default
  // hyperparameters and overlaying whatever the document pins down.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  std::string to_json_text() const;
  std::uint64_t config_hash() const;
};

struct EvalRow {
  long long queries = 0;
  double jb = 0.0;
  double jf = 0.0;
  double jm = 0.0;
};

struct RunRecord {
  std::vector<EvalRow> rows;
  std::vector<long long> final_counts;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_clock_sec = 0.0;
};

// Regret of the posterior-mean route: 0 when f(mean) is within 0.01 L1 of the
// ground-truth rank, else 1.
int regret_jm(const PayoffTensor& belief_mean, const AlphaRank& r_gt, double epsilon);

// One minus the empirical mass the rank belief assigns to the ground truth.
double regret_jf(const RankSampleSet& set, const AlphaRank& r_gt);

// One minus the empirical mass of the belief's own mode.
double regret_jb(const RankSampleSet& set);

RunRecord run(const ExperimentConfig& config, std::uint64_t seed);

std::string record_csv(const RunRecord& record);
void write_record(const RunRecord& record, const ExperimentConfig& config,
                  const std::string& out_dir);

struct SweepRow {
  std::string name;
  std::uint64_t config_hash = 0;
  int seeds_ok = 0;
  int seeds_failed = 0;
  double auc_jm = 0.0;  // area under the mean J^M trace
  std::vector<EvalRow> mean_rows;
  std::vector<EvalRow> se_rows;  // jb/jf/jm hold standard errors
};

std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs);
void write_sweep(const std::vector<SweepRow>& rows, const std::string& out_dir);

// Fraction of committed observations falling in each entry group.
std::vector<double> entry_proportions(const RunRecord& record,
                                      const std::vector<std::vector<int>>& groups);

double auc_trapezoid(const std::vector<std::pair<double, double>>& points);

}  // namespace egta

#endif  // EGTA_EXPERIMENT_HPP
