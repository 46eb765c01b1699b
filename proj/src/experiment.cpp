#include "egta/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace egta {

namespace {

using nlohmann::json;

// Stream tags under the per-run root key.
constexpr std::uint64_t kStreamSelect = 1;
constexpr std::uint64_t kStreamObserve = 2;
constexpr std::uint64_t kStreamEval = 3;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string noise_name(GameEnv::Noise noise) {
  return noise == GameEnv::Noise::bernoulli ? "bernoulli" : "clipped_gaussian";
}

GameEnv::Noise noise_from_name(const std::string& name) {
  if (name == "bernoulli") return GameEnv::Noise::bernoulli;
  if (name == "clipped_gaussian") return GameEnv::Noise::clipped_gaussian;
  throw std::invalid_argument("unknown observation model: " + name);
}

std::string game_type_name(GameSpec::Type type) {
  switch (type) {
    case GameSpec::Type::good_bad:
      return "good_bad";
    case GameSpec::Type::gaussian:
      return "gaussian";
    case GameSpec::Type::matrix:
      return "matrix";
  }
  return "good_bad";
}

GameSpec::Type game_type_from_name(const std::string& name) {
  if (name == "good_bad") return GameSpec::Type::good_bad;
  if (name == "gaussian") return GameSpec::Type::gaussian;
  if (name == "matrix") return GameSpec::Type::matrix;
  throw std::invalid_argument("unknown game type: " + name);
}

// Default hyperparameters, keyed on game shape and sampler.
void apply_defaults(ExperimentConfig& config) {
  const bool big_good_bad =
      config.game.type == GameSpec::Type::good_bad && config.game.side() > 4;
  const bool gaussian = config.game.type == GameSpec::Type::gaussian;
  const bool block_kernel = config.kernel.kind == KernelSpec::Kind::block_antisymmetric;

  if (gaussian) {
    config.hp.hallucinations = 10;
    config.hp.rank_samples = 500;
    config.hp.queries_per_selection = 100;
    config.hp.delta = 0.3;
    config.hp.payoff_lo = -1.0;
    config.hp.payoff_hi = 2.0;
    if (config.sampler == SamplerKind::alpha_ig_binning) {
      config.kernel.sigma0_sq = 1.0;
      config.obs_noise_var = 1.0;
    } else if (config.sampler == SamplerKind::alpha_ig_nsb) {
      config.kernel.sigma0_sq = 0.5;
      config.obs_noise_var = 0.5;
    } else {
      config.kernel.sigma0_sq = 1.0;
      config.obs_noise_var = 0.5;
    }
  } else if (big_good_bad) {
    config.hp.hallucinations = 10;
    config.hp.rank_samples = 500;
    config.hp.queries_per_selection = block_kernel ? 100 : 500;
    config.hp.delta = 0.05;
    config.obs_noise_var = config.sampler == SamplerKind::alpha_wass ? 0.25 : 0.5;
    if (block_kernel) config.obs_noise_var = 0.5;
  } else {
    config.hp.hallucinations = 20;
    config.hp.rank_samples = 1000;
    config.hp.queries_per_selection = 10;
    config.hp.delta = 0.4;
    config.obs_noise_var = config.sampler == SamplerKind::alpha_wass ? 0.25 : 0.5;
  }
  config.hp.condition_repeats = 100;
}

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string sampler_kind_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::alpha_ig_binning:
      return "alpha_ig_binning";
    case SamplerKind::alpha_ig_nsb:
      return "alpha_ig_nsb";
    case SamplerKind::alpha_wass:
      return "alpha_wass";
    case SamplerKind::payoff_ig:
      return "payoff_ig";
    case SamplerKind::uniform:
      return "uniform";
    case SamplerKind::rg_ucb:
      return "rg_ucb";
  }
  return "uniform";
}

SamplerKind sampler_kind_from_name(const std::string& name) {
  if (name == "alpha_ig_binning") return SamplerKind::alpha_ig_binning;
  if (name == "alpha_ig_nsb") return SamplerKind::alpha_ig_nsb;
  if (name == "alpha_wass") return SamplerKind::alpha_wass;
  if (name == "payoff_ig") return SamplerKind::payoff_ig;
  if (name == "uniform") return SamplerKind::uniform;
  if (name == "rg_ucb") return SamplerKind::rg_ucb;
  throw std::invalid_argument("unknown sampler: " + name);
}

GameEnv GameSpec::build() const {
  switch (type) {
    case Type::good_bad:
      return good_bad_game(n_good, n_bad, p_top);
    case Type::gaussian:
      return gaussian_game(size, RngKey::root(seed));
    case Type::matrix: {
      if (matrix.empty()) throw std::invalid_argument("matrix game needs a matrix");
      const int s = static_cast<int>(matrix.size());
      Eigen::MatrixXd m(s, s);
      for (int i = 0; i < s; ++i) {
        if (static_cast<int>(matrix[i].size()) != s)
          throw std::invalid_argument("matrix game must be square");
        for (int j = 0; j < s; ++j) m(i, j) = matrix[i][j];
      }
      return matrix_game(m, noise);
    }
  }
  throw std::logic_error("unknown game type");
}

int GameSpec::side() const {
  switch (type) {
    case Type::good_bad:
      return n_good + n_bad;
    case Type::gaussian:
      return size;
    case Type::matrix:
      return static_cast<int>(matrix.size());
  }
  return 0;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json doc = json::parse(text);
  ExperimentConfig config;

  if (!doc.contains("game") || !doc["game"].contains("type"))
    throw std::invalid_argument("config requires game.type");
  const json& game = doc["game"];
  config.game.type = game_type_from_name(game["type"].get<std::string>());
  config.game.n_good = game.value("n_good", config.game.n_good);
  config.game.n_bad = game.value("n_bad", config.game.n_bad);
  config.game.p_top = game.value("p_top", config.game.p_top);
  config.game.size = game.value("size", config.game.size);
  config.game.seed = game.value("seed", config.game.seed);
  if (game.contains("noise")) config.game.noise = noise_from_name(game["noise"].get<std::string>());
  if (config.game.type == GameSpec::Type::gaussian)
    config.game.noise = GameEnv::Noise::clipped_gaussian;
  if (game.contains("matrix"))
    config.game.matrix = game["matrix"].get<std::vector<std::vector<double>>>();

  if (doc.contains("sampler") && doc["sampler"].contains("type"))
    config.sampler = sampler_kind_from_name(doc["sampler"]["type"].get<std::string>());

  if (doc.contains("belief") && doc["belief"].contains("kernel")) {
    const std::string kernel = doc["belief"]["kernel"].get<std::string>();
    if (kernel == "block_antisymmetric") {
      if (config.game.type != GameSpec::Type::good_bad)
        throw std::invalid_argument("block kernel requires a good_bad game");
      config.kernel = KernelSpec::block_antisymmetric(
          config.game.n_good, config.game.n_bad,
          doc["belief"].value("scale_divisor", 500.0));
    } else if (kernel != "independent") {
      throw std::invalid_argument("unknown kernel: " + kernel);
    }
  }

  apply_defaults(config);

  config.name = doc.value("name", std::string());
  config.epsilon = doc.value("epsilon", config.epsilon);
  config.budget = doc.value("budget", config.budget);
  config.eval_points = doc.value("eval_points", config.eval_points);
  config.eval_samples = doc.value("eval_samples", config.eval_samples);
  if (doc.contains("seeds")) config.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();

  if (doc.contains("sampler")) {
    const json& s = doc["sampler"];
    config.hp.hallucinations = s.value("hallucinations", config.hp.hallucinations);
    config.hp.rank_samples = s.value("rank_samples", config.hp.rank_samples);
    config.hp.queries_per_selection =
        s.value("queries_per_selection", config.hp.queries_per_selection);
    config.hp.condition_repeats = s.value("condition_repeats", config.hp.condition_repeats);
    config.hp.delta = s.value("delta", config.hp.delta);
    config.hp.payoff_lo = s.value("payoff_lo", config.hp.payoff_lo);
    config.hp.payoff_hi = s.value("payoff_hi", config.hp.payoff_hi);
    config.rg_prior_knowledge = s.value("prior_knowledge", config.rg_prior_knowledge);
  }
  if (doc.contains("belief")) {
    const json& b = doc["belief"];
    config.kernel.mean0 = b.value("mu0", config.kernel.mean0);
    config.kernel.sigma0_sq = b.value("sigma0_sq", config.kernel.sigma0_sq);
    config.obs_noise_var = b.value("obs_noise_var", config.obs_noise_var);
  }

  if (config.budget < config.hp.queries_per_selection)
    throw std::invalid_argument("budget must cover at least one selection round");
  if (config.eval_points < 1 || config.eval_samples < 1)
    throw std::invalid_argument("eval schedule must be positive");
  if (config.rg_prior_knowledge &&
      (config.sampler != SamplerKind::rg_ucb || config.game.type != GameSpec::Type::good_bad))
    throw std::invalid_argument("prior-knowledge injection requires RG-UCB on a good_bad game");
  if (config.name.empty())
    config.name = game_type_name(config.game.type) + "_" + sampler_kind_name(config.sampler);
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json doc;
  doc["name"] = name;
  doc["game"]["type"] = game_type_name(game.type);
  doc["game"]["n_good"] = game.n_good;
  doc["game"]["n_bad"] = game.n_bad;
  doc["game"]["p_top"] = game.p_top;
  doc["game"]["size"] = game.size;
  doc["game"]["seed"] = game.seed;
  doc["game"]["noise"] = noise_name(game.noise);
  if (!game.matrix.empty()) doc["game"]["matrix"] = game.matrix;
  doc["sampler"]["type"] = sampler_kind_name(sampler);
  doc["sampler"]["hallucinations"] = hp.hallucinations;
  doc["sampler"]["rank_samples"] = hp.rank_samples;
  doc["sampler"]["queries_per_selection"] = hp.queries_per_selection;
  doc["sampler"]["condition_repeats"] = hp.condition_repeats;
  doc["sampler"]["delta"] = hp.delta;
  doc["sampler"]["payoff_lo"] = hp.payoff_lo;
  doc["sampler"]["payoff_hi"] = hp.payoff_hi;
  doc["sampler"]["prior_knowledge"] = rg_prior_knowledge;
  doc["belief"]["kernel"] = kernel.kind_name();
  doc["belief"]["mu0"] = kernel.mean0;
  doc["belief"]["sigma0_sq"] = kernel.sigma0_sq;
  doc["belief"]["scale_divisor"] = kernel.scale_divisor;
  doc["belief"]["obs_noise_var"] = obs_noise_var;
  doc["epsilon"] = epsilon;
  doc["budget"] = budget;
  doc["eval_points"] = eval_points;
  doc["eval_samples"] = eval_samples;
  doc["seeds"] = seeds;
  return doc.dump(2);
}

std::uint64_t ExperimentConfig::config_hash() const { return fnv1a(to_json_text()); }

int regret_jm(const PayoffTensor& belief_mean, const AlphaRank& r_gt, double epsilon) {
  const AlphaRank ranked = alpha_rank(belief_mean, epsilon);
  if (ranked.p.size() != r_gt.p.size())
    throw std::invalid_argument("rank dimensions do not match");
  return (ranked.p - r_gt.p).cwiseAbs().sum() < 0.01 ? 0 : 1;
}

double regret_jf(const RankSampleSet& set, const AlphaRank& r_gt) {
  return 1.0 - prob_of(set, r_gt, 0.01);
}

double regret_jb(const RankSampleSet& set) { return 1.0 - prob_of(set, mode(set), 0.01); }

namespace {

struct Runner {
  const ExperimentConfig& config;
  GameEnv env;
  AlphaRank r_gt;
  RankCache cache;
  SamplerState state;
  RngKey run_key;
  bool is_rg_ucb;

  Runner(const ExperimentConfig& cfg, std::uint64_t seed)
      : config(cfg),
        env(cfg.game.build()),
        r_gt(alpha_rank(env.ground_truth, cfg.epsilon)),
        cache(cfg.epsilon),
        state(SamplerState::make(env.side(), cfg.hp, cfg.epsilon, make_belief(cfg, env.side()))),
        run_key(RngKey::root(seed)),
        is_rg_ucb(cfg.sampler == SamplerKind::rg_ucb) {}

  static std::optional<GaussianBelief> make_belief(const ExperimentConfig& cfg, int side) {
    if (cfg.sampler == SamplerKind::rg_ucb) return std::nullopt;
    return GaussianBelief::prior(cfg.kernel, side * side, cfg.obs_noise_var);
  }

  int select(long long round) {
    const RngKey step_key = run_key.child(kStreamSelect).child(static_cast<std::uint64_t>(round));
    switch (config.sampler) {
      case SamplerKind::alpha_ig_binning:
        return alpha_ig_select(state, EntropyKind::binning, cache, step_key);
      case SamplerKind::alpha_ig_nsb:
        return alpha_ig_select(state, EntropyKind::nsb, cache, step_key);
      case SamplerKind::alpha_wass:
        return alpha_wass_select(state, cache, step_key);
      case SamplerKind::payoff_ig:
        return payoff_ig_select(state);
      case SamplerKind::uniform:
        return uniform_select(state, step_key);
      case SamplerKind::rg_ucb:
        return rg_ucb_step(state);
    }
    throw std::logic_error("unknown sampler kind");
  }

  EvalRow evaluate(long long queries, long long round) {
    const RngKey eval_key = run_key.child(kStreamEval).child(static_cast<std::uint64_t>(round));
    EvalRow row;
    row.queries = queries;

    RankSampleSet set =
        is_rg_ucb
            ? sample_ranks_interval(rg_ucb_interval_belief(state), config.eval_samples,
                                    config.epsilon, &cache, eval_key)
            : sample_ranks(*state.belief, config.eval_samples, config.epsilon, &cache, eval_key);
    set.aggregation_precision = 3;
    row.jb = regret_jb(set);
    row.jf = regret_jf(set, r_gt);

    const PayoffTensor mean =
        is_rg_ucb ? PayoffTensor::from_matrix(rg_ucb_interval_belief(state).midpoint_matrix())
                  : state.belief->posterior_mean();
    row.jm = regret_jm(mean, r_gt, config.epsilon);
    return row;
  }
};

}  // namespace

RunRecord run(const ExperimentConfig& config, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Runner runner(config, seed);

  const long long rounds = config.budget / config.hp.queries_per_selection;
  const long long eval_count = std::min<long long>(config.eval_points, rounds);
  std::set<long long> eval_rounds;
  for (long long k = 1; k <= eval_count; ++k)
    eval_rounds.insert((rounds * k + eval_count - 1) / eval_count);

  RunRecord record;
  record.seed = seed;
  record.config_hash = config.config_hash();
  record.rows.push_back(runner.evaluate(0, 0));

  long long queries = 0;
  for (long long round = 1; round <= rounds; ++round) {
    const int entry = runner.select(round);
    if (entry >= 0) {
      const RngKey obs_key =
          runner.run_key.child(kStreamObserve).child(static_cast<std::uint64_t>(round));
      for (int j = 0; j < config.hp.queries_per_selection; ++j) {
        Rng rng(obs_key.child(static_cast<std::uint64_t>(j)));
        const double value = observe(runner.env, entry, rng);
        runner.state.commit(entry, value);
        if (config.rg_prior_knowledge) {
          for (const auto& [pseudo_entry, pseudo_value] :
               inject_pseudo_samples(entry, value, config.game.n_good, runner.env.side()))
            runner.state.commit_pseudo(pseudo_entry, pseudo_value);
        }
      }
      queries += config.hp.queries_per_selection;
    }
    if (eval_rounds.count(round) != 0) record.rows.push_back(runner.evaluate(queries, round));
  }

  record.final_counts = runner.state.counts;
  record.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::string record_csv(const RunRecord& record) {
  std::string out = "queries,jb,jf,jm\n";
  for (const EvalRow& row : record.rows) {
    out += std::to_string(row.queries);
    out += ',' + format_double(row.jb);
    out += ',' + format_double(row.jf);
    out += ',' + format_double(row.jm);
    out += '\n';
  }
  return out;
}

void write_record(const RunRecord& record, const ExperimentConfig& config,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem = config.name + "_seed" + std::to_string(record.seed);
  {
    std::ofstream csv(fs::path(out_dir) / (stem + ".csv"), std::ios::binary);
    csv << record_csv(record);
  }
  json manifest;
  manifest["format_version"] = 1;
  manifest["tool"] = "egta 0.1.0";
  manifest["config"] = json::parse(config.to_json_text());
  manifest["seed"] = record.seed;
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(record.config_hash));
  manifest["config_hash"] = hash_hex;
  manifest["wall_clock_sec"] = record.wall_clock_sec;
  manifest["final_counts"] = record.final_counts;
  // The x-axis counts raw environment queries; selections happen every
  // queries_per_selection of them.
  manifest["queries_are_raw"] = true;
  manifest["queries_per_selection"] = config.hp.queries_per_selection;
  std::ofstream mf(fs::path(out_dir) / (stem + ".manifest.json"));
  mf << manifest.dump(2) << "\n";
}

std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw std::invalid_argument("sweep needs at least one config");
  std::vector<SweepRow> rows;
  for (const ExperimentConfig& config : configs) {
    SweepRow row;
    row.name = config.name;
    row.config_hash = config.config_hash();
    std::vector<RunRecord> records;
    for (std::uint64_t seed : config.seeds) {
      try {
        records.push_back(run(config, seed));
        row.seeds_ok += 1;
      } catch (const std::exception&) {
        row.seeds_failed += 1;
      }
    }
    if (!records.empty()) {
      const std::size_t points = records.front().rows.size();
      for (std::size_t i = 0; i < points; ++i) {
        EvalRow mean;
        mean.queries = records.front().rows[i].queries;
        for (const RunRecord& r : records) {
          mean.jb += r.rows[i].jb;
          mean.jf += r.rows[i].jf;
          mean.jm += r.rows[i].jm;
        }
        const double n = static_cast<double>(records.size());
        mean.jb /= n;
        mean.jf /= n;
        mean.jm /= n;
        EvalRow se;
        se.queries = mean.queries;
        if (records.size() > 1) {
          double vb = 0, vf = 0, vm = 0;
          for (const RunRecord& r : records) {
            vb += std::pow(r.rows[i].jb - mean.jb, 2);
            vf += std::pow(r.rows[i].jf - mean.jf, 2);
            vm += std::pow(r.rows[i].jm - mean.jm, 2);
          }
          const double denom = n * (n - 1.0);
          se.jb = std::sqrt(vb / denom);
          se.jf = std::sqrt(vf / denom);
          se.jm = std::sqrt(vm / denom);
        }
        row.mean_rows.push_back(mean);
        row.se_rows.push_back(se);
      }
      std::vector<std::pair<double, double>> jm_trace;
      for (const EvalRow& r : row.mean_rows)
        jm_trace.emplace_back(static_cast<double>(r.queries), r.jm);
      row.auc_jm = auc_trapezoid(jm_trace);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  summary << "name,config_hash,seeds_ok,seeds_failed,auc_jm\n";
  for (const SweepRow& row : rows) {
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(row.config_hash));
    summary << row.name << ',' << hash_hex << ',' << row.seeds_ok << ',' << row.seeds_failed
            << ',' << format_double(row.auc_jm) << "\n";
    std::ofstream curve(fs::path(out_dir) / (row.name + "_curve.csv"));
    curve << "queries,jb_mean,jb_se,jf_mean,jf_se,jm_mean,jm_se\n";
    for (std::size_t i = 0; i < row.mean_rows.size(); ++i) {
      const EvalRow& m = row.mean_rows[i];
      const EvalRow& s = row.se_rows[i];
      curve << m.queries << ',' << format_double(m.jb) << ',' << format_double(s.jb) << ','
            << format_double(m.jf) << ',' << format_double(s.jf) << ',' << format_double(m.jm)
            << ',' << format_double(s.jm) << "\n";
    }
  }
}

std::vector<double> entry_proportions(const RunRecord& record,
                                      const std::vector<std::vector<int>>& groups) {
  long long total = 0;
  for (long long c : record.final_counts) total += c;
  if (total == 0) throw std::invalid_argument("record has no observations");
  std::vector<double> out;
  out.reserve(groups.size());
  for (const auto& group : groups) {
    long long sum = 0;
    for (int e : group) sum += record.final_counts.at(static_cast<std::size_t>(e));
    out.push_back(static_cast<double>(sum) / static_cast<double>(total));
  }
  return out;
}

double auc_trapezoid(const std::vector<std::pair<double, double>>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += 0.5 * (points[i].second + points[i - 1].second) *
            (points[i].first - points[i - 1].first);
  return area;
}

}  // namespace egta
