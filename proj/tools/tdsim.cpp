// Command-line experiment runner: train / eval / summarize.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdsim/runner.hpp"

using namespace tdsim;

namespace {

int cmd_train(const std::string& config_path, const std::string& mode,
              const std::string& learning, double tau,
              const std::string& regime, const std::string& fixed_compression,
              const std::string& meta, long long seed, int episodes,
              int steps, const std::string& out, bool trace) {
  SimConfig cfg =
      config_path.empty() ? load_config("") : load_config_file(config_path);

  // CLI flags override document values.
  if (!mode.empty()) cfg.mode = mode_from_string(mode);
  if (!learning.empty()) cfg.learning = learning_from_string(learning);
  if (tau > 0.0) cfg.latency_threshold_ms = tau;
  if (!regime.empty()) {
    cfg.regime = regime_from_string(regime);
    std::tie(cfg.p_gb, cfg.p_bg) = channel_regime(cfg.regime);
  }
  if (!fixed_compression.empty()) cfg.fixed_compression = fixed_compression;
  if (!meta.empty()) cfg.meta_algorithm = meta_algorithm_from_string(meta);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (episodes > 0) cfg.episodes = episodes;
  if (steps > 0) cfg.steps_per_episode = steps;
  if (trace) cfg.trace = true;
  cfg.validate();

  const CampaignResult result = run_campaign(cfg, out);
  const int tail = cfg.summary_tail_episodes;
  std::printf("campaign complete: %zu episodes -> %s\n",
              result.episodes.size(), out.empty() ? "(no output dir)"
                                                  : out.c_str());
  std::printf("tail(%d) ca_reward=%.4f map=%.4f p_deadline=%.4f\n", tail,
              tail_mean(result.episodes, tail, &EpisodeMetrics::ca_reward_mean),
              tail_mean(result.episodes, tail, &EpisodeMetrics::map_mean),
              tail_mean(result.episodes, tail,
                        &EpisodeMetrics::deadline_hit_prob));
  return 0;
}

int cmd_eval(const std::string& checkpoint, int episodes) {
  const CampaignResult result = run_eval(checkpoint, episodes);
  std::printf("eval complete: %zu episodes -> %s/eval_metrics.csv\n",
              result.episodes.size(), checkpoint.c_str());
  return 0;
}

int cmd_summarize(const std::string& in_dir) {
  std::ifstream in(in_dir + "/metrics.csv");
  if (!in) {
    std::fprintf(stderr, "summarize: cannot open %s/metrics.csv\n",
                 in_dir.c_str());
    return 1;
  }
  std::string header;
  std::getline(in, header);
  std::vector<std::string> columns;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) columns.push_back(col);
  }
  std::vector<std::vector<double>> data(columns.size());
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',') && i < columns.size()) {
      try {
        data[i].push_back(std::stod(cell));
      } catch (...) {
        data[i].push_back(std::nan(""));
      }
      ++i;
    }
  }

  nlohmann::json j;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    std::vector<double> clean;
    for (double v : data[i])
      if (!std::isnan(v)) clean.push_back(v);
    if (clean.empty()) continue;
    const BoxplotSummary s = summarize(clean);
    j[columns[i]] = {{"mean", s.mean},       {"min", s.min},
                     {"q1", s.q1},           {"median", s.median},
                     {"q3", s.q3},           {"max", s.max},
                     {"whisker_lo", s.whisker_lo},
                     {"whisker_hi", s.whisker_hi},
                     {"outliers", s.n_outliers}};
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teleoperated-driving uplink simulator"};
  app.require_subcommand(1);

  std::string config_path, mode, learning, regime, fixed_compression, meta;
  std::string out_dir, checkpoint, in_dir;
  double tau = 0.0;
  long long seed = -1;
  int episodes = 0, steps = 0, eval_episodes = 10;
  bool trace = false;

  auto* train = app.add_subcommand("train", "Train agents for one arm");
  train->add_option("--config", config_path, "Config document (JSON)");
  train->add_option("--mode", mode, "C|S|ICS|CCS|META");
  train->add_option("--learning", learning, "centralized|federated");
  train->add_option("--tau", tau, "Latency threshold in ms (30|50)");
  train->add_option("--regime", regime,
                    "STATIC_G|STATIC_B|DC_1_6|DC_1_2");
  train->add_option("--fixed-compression", fixed_compression,
                    "C1|C2|C3 (S mode arm)");
  train->add_option("--meta", meta, "R|EG|LTS|NLTS|DDQL");
  train->add_option("--seed", seed, "Master seed");
  train->add_option("--episodes", episodes, "Override episode count");
  train->add_option("--steps", steps, "Override steps per episode");
  train->add_option("--out", out_dir, "Campaign output directory");
  train->add_flag("--trace", trace, "Write per-slot trace.jsonl");

  auto* eval = app.add_subcommand("eval", "Evaluate a trained campaign");
  eval->add_option("--checkpoint", checkpoint, "Campaign directory")
      ->required();
  eval->add_option("--episodes", eval_episodes, "Evaluation episodes");

  auto* summ = app.add_subcommand("summarize", "Boxplot summary of metrics");
  summ->add_option("--in", in_dir, "Campaign directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config_path, mode, learning, tau, regime,
                       fixed_compression, meta, seed, episodes, steps, out_dir,
                       trace);
    if (eval->parsed()) return cmd_eval(checkpoint, eval_episodes);
    if (summ->parsed()) return cmd_summarize(in_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
