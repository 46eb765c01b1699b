// Command-line front end: rank computation, experiment runs, sweeps,
// objective inspection, and the theoretical bound curve.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "egta/experiment.hpp"
#include "egta/theory.hpp"

namespace {

using namespace egta;

int cmd_rank(const std::string& path, double epsilon) {
  PayoffTensor payoffs = path.size() > 4 && path.substr(path.size() - 4) == ".csv"
                             ? PayoffTensor::load_csv(path)
                             : PayoffTensor::load_json(path);
  const AlphaRank rank = alpha_rank(payoffs, epsilon);
  nlohmann::json out;
  out["epsilon"] = epsilon;
  out["alpha_rank"] = std::vector<double>(rank.p.data(), rank.p.data() + rank.p.size());
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool dump_ground_truth) {
  const ExperimentConfig config = ExperimentConfig::load(config_path);
  std::filesystem::create_directories(out_dir);
  if (dump_ground_truth) {
    const GameEnv env = config.game.build();
    env.ground_truth.save_json((std::filesystem::path(out_dir) / "ground_truth.json").string());
  }
  for (std::uint64_t seed : config.seeds) {
    const RunRecord record = run(config, seed);
    write_record(record, config, out_dir);
    std::fprintf(stderr, "run %s seed %llu: %zu eval points, %.1fs\n", config.name.c_str(),
                 static_cast<unsigned long long>(seed), record.rows.size(),
                 record.wall_clock_sec);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  nlohmann::json doc = nlohmann::json::parse(in);
  std::vector<ExperimentConfig> configs;
  const nlohmann::json& list = doc.is_array() ? doc : doc.at("configs");
  for (const auto& item : list) configs.push_back(ExperimentConfig::from_json_text(item.dump()));
  const auto rows = sweep(configs);
  write_sweep(rows, out_dir);
  for (const auto& row : rows)
    std::fprintf(stderr, "sweep %s: %d ok, %d failed, auc_jm=%.4f\n", row.name.c_str(),
                 row.seeds_ok, row.seeds_failed, row.auc_jm);
  return 0;
}

// Per-entry objective values after a burn-in, for the objective-inspection
// plots: every entry observed burn_in times, optionally followed by extra
// observations of the entries that decide the top-two good agents.
int cmd_inspect(const std::string& config_path, const std::string& out_dir, int burn_in,
                int extra_red, int seeds) {
  const ExperimentConfig config = ExperimentConfig::load(config_path);
  const GameEnv env = config.game.build();
  const int side = env.side();

  std::filesystem::create_directories(out_dir);
  std::ofstream csv(std::filesystem::path(out_dir) / (config.name + "_objectives.csv"));
  csv << "seed,row,col,ig_binning,ig_nsb,wass,current_entropy\n";

  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = static_cast<std::uint64_t>(s) + 1;
    RankCache cache(config.epsilon);
    SamplerState state = SamplerState::make(
        side, config.hp, config.epsilon,
        GaussianBelief::prior(config.kernel, side * side, config.obs_noise_var));
    const RngKey key = RngKey::root(seed);
    long long obs_index = 0;
    for (int e = 0; e < side * side; ++e)
      for (int i = 0; i < burn_in; ++i) {
        Rng rng(key.child(0).child(static_cast<std::uint64_t>(obs_index++)));
        state.commit(e, observe(env, e, rng));
      }
    if (extra_red > 0 && config.game.type == GameSpec::Type::good_bad) {
      const int top = config.game.n_good - 1;
      const int red[2] = {(top - 1) * side + top, top * side + (top - 1)};
      for (int e : red)
        for (int i = 0; i < extra_red; ++i) {
          Rng rng(key.child(0).child(static_cast<std::uint64_t>(obs_index++)));
          state.commit(e, observe(env, e, rng));
        }
    }

    const RngKey score_key = key.child(1);
    const auto ig_bin = alpha_ig_scores(state, EntropyKind::binning, cache, score_key);
    const auto ig_nsb = alpha_ig_scores(state, EntropyKind::nsb, cache, score_key.child(7));
    const auto wass = alpha_wass_scores(state, cache, score_key.child(8));
    RankSampleSet current = sample_ranks(*state.belief, config.hp.rank_samples, config.epsilon,
                                         &cache, score_key.child(9));
    const double current_entropy = entropy_binning(current).value;
    for (int e = 0; e < side * side; ++e) {
      csv << seed << ',' << e / side << ',' << e % side << ',' << ig_bin[e] << ',' << ig_nsb[e]
          << ',' << wass[e] << ',' << current_entropy << "\n";
    }
  }
  return 0;
}

int cmd_bound(double delta, double sigma_a2, double sigma_02, int entries, double m_norm2,
              double t_max, int points) {
  TheoryParams params;
  params.delta_sep = delta;
  params.sigma_a2 = sigma_a2;
  params.sigma_02 = sigma_02;
  params.n_entries = entries;
  params.prior_cov = Eigen::MatrixXd::Identity(entries, entries) * sigma_02;
  params.m_star_norm2 = m_norm2;

  std::printf("t,g,bound\n");
  for (int i = 0; i < points; ++i) {
    const double t =
        points == 1 ? t_max : std::pow(t_max, static_cast<double>(i) / (points - 1));
    const double tt = std::max(1.0, t);
    std::printf("%.6g,%.10g,%.10g\n", tt, regret_exponent_g(params, tt),
                regret_bound_curve(params, tt));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active alpha-rank estimation from sampled payoffs"};
  app.require_subcommand(1);

  std::string payoff_path;
  double epsilon = 1e-6;
  auto* rank = app.add_subcommand("rank", "Print the alpha-rank of a payoff matrix");
  rank->add_option("payoff", payoff_path, "payoff JSON or CSV file")->required();
  rank->add_option("--epsilon", epsilon, "perturbation for the transition matrix");

  std::string config_path, out_dir = "out";
  bool dump_ground_truth = false;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment config over its seeds");
  run_cmd->add_option("config", config_path, "experiment config JSON")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--dump-ground-truth", dump_ground_truth, "write the game matrix as JSON");

  std::string sweep_config, sweep_out = "out";
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a list of configs and summarize");
  sweep_cmd->add_option("config", sweep_config, "JSON array of experiment configs")->required();
  sweep_cmd->add_option("--out", sweep_out, "output directory");

  std::string inspect_config, inspect_out = "out";
  int burn_in = 5, extra_red = 0, inspect_seeds = 10;
  auto* inspect_cmd = app.add_subcommand("inspect", "Objective values per entry after a burn-in");
  inspect_cmd->add_option("config", inspect_config, "experiment config JSON")->required();
  inspect_cmd->add_option("--out", inspect_out, "output directory");
  inspect_cmd->add_option("--burn-in", burn_in, "observations per entry before scoring");
  inspect_cmd->add_option("--extra-red", extra_red, "extra observations for the top-pair entries");
  inspect_cmd->add_option("--seeds", inspect_seeds, "number of seeds");

  double b_delta = 0.1, b_sa2 = 0.5, b_s02 = 1.0, b_norm = 8.0, b_tmax = 1e6;
  int b_entries = 16, b_points = 61;
  auto* bound_cmd = app.add_subcommand("bound", "Print the theoretical regret-bound curve");
  bound_cmd->add_option("--delta", b_delta, "payoff separability");
  bound_cmd->add_option("--sigma-a2", b_sa2, "observation noise variance");
  bound_cmd->add_option("--sigma-02", b_s02, "prior variance");
  bound_cmd->add_option("--entries", b_entries, "number of payoff entries");
  bound_cmd->add_option("--m-norm2", b_norm, "squared 2-norm of the true payoffs");
  bound_cmd->add_option("--t-max", b_tmax, "largest timestep");
  bound_cmd->add_option("--points", b_points, "curve resolution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rank->parsed()) return cmd_rank(payoff_path, epsilon);
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir, dump_ground_truth);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_config, sweep_out);
    if (inspect_cmd->parsed())
      return cmd_inspect(inspect_config, inspect_out, burn_in, extra_red, inspect_seeds);
    if (bound_cmd->parsed())
      return cmd_bound(b_delta, b_sa2, b_s02, b_entries, b_norm, b_tmax, b_points);
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
