// Experiment configuration: every tunable of the simulator and the agents,
// loadable from a JSON document with strict validation.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tdsim {

enum class Mode { C, S, ICS, CCS, META };
enum class Learning { Centralized, Federated };
enum class MetaAlgorithm { None, R, EG, LTS, NLTS, DDQL };
enum class Regime { StaticG, StaticB, Dc16, Dc12 };

std::string to_string(Mode m);
std::string to_string(Learning l);
std::string to_string(MetaAlgorithm a);
std::string to_string(Regime r);
Mode mode_from_string(const std::string& s);
Learning learning_from_string(const std::string& s);
MetaAlgorithm meta_algorithm_from_string(const std::string& s);
Regime regime_from_string(const std::string& s);

// (p_gb, p_bg) for a named channel regime.
std::pair<double, double> channel_regime(Regime r);
std::pair<double, double> channel_regime(const std::string& name);

// SINR-to-rate ladder: 29 ascending dB cutoffs, 29 ascending spectral
// efficiencies (information bits per resource element).
struct McsTable {
  std::vector<double> thresholds_db;
  std::vector<double> efficiencies;

  static McsTable nr_default();
  void validate() const;
  bool operator==(const McsTable&) const = default;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  // Scenario
  int n_ues = 5;
  double carrier_ghz = 28.0;
  double bandwidth_mhz = 50.0;
  int numerology = 3;
  double symbol_duration_us = 8.92;
  int useful_symbols_per_slot = 12;
  int n_prb = 32;
  double lidar_fps = 30.0;
  double latency_threshold_ms = 50.0;  // one of {30, 50}
  int priority_levels = 3;

  // Learning hyperparameters
  double gamma = 0.95;
  double gae_lambda = 0.95;
  double learning_rate = 1e-4;
  double ppo_clip = 0.2;
  double ppo_c1 = 0.5;
  double ppo_c2 = 0.01;
  int ppo_epochs = 10;
  int minibatch = 64;
  int window_w = 1;
  int t_ddql = 8000;
  int t_ppo = 512;
  int t_nlts = 128;
  double lts_rm = 1.0;
  double lts_rho = 0.5;
  int episodes = 250;
  int steps_per_episode = 400;

  // Backhaul
  double backhaul_delay_ms = 10.0;
  double backhaul_rate_gbps = 100.0;

  // Channel
  Regime regime = Regime::StaticG;
  double p_gb = 0.0;
  double p_bg = 1.0;
  double sinr_mean_g_db = 30.0;
  double sinr_mean_b_db = 5.0;
  double sinr_spread_db = 3.0;      // Gaussian std in dB, 0 disables noise
  double sinr_truncation_db = 10.0; // hard bound around the state mean
  double outage_prob_g = 0.0;
  double outage_prob_b = 0.2;
  McsTable mcs_table = McsTable::nr_default();

  // Run selection
  Mode mode = Mode::C;
  Learning learning = Learning::Centralized;
  MetaAlgorithm meta_algorithm = MetaAlgorithm::None;
  std::string fixed_compression = "C3";  // S-mode arm
  std::uint64_t seed = 0;

  // Agent plumbing
  int replay_capacity = 100000;
  double epsilon_start = 1.0;
  double epsilon_min = 0.01;
  double epsilon_decay_fraction = 0.8;
  double eg_epsilon = 0.1;
  double eg_alpha = 0.1;
  int layer_stats_window = 20;
  bool advantage_normalization = true;
  std::vector<int> ca_hidden = {64, 32};
  std::vector<int> sa_hidden = {64, 64};
  std::vector<int> meta_hidden = {64, 32};
  int federation_period_episodes = 1;
  bool meta_concurrent_training = true;
  int nlts_retrain_epochs = 10;
  int nlts_history_capacity = 100000;
  int summary_tail_episodes = 25;

  // Feature normalization ranges
  double norm_sinr_min_db = -10.0;
  double norm_sinr_max_db = 40.0;
  double norm_latency_max_ms = 500.0;
  double norm_occupancy_frames = 5.0;
  double norm_symbols_max = 10000.0;
  double norm_reward_min = -5.0;

  bool trace = false;

  bool operator==(const SimConfig&) const = default;

  // Derived quantities
  double slot_ms() const { return 14.0 * symbol_duration_us / 1000.0; }
  double frame_period_ms() const { return 1000.0 / lidar_fps; }

  void validate() const;  // throws ValidationError naming the field
  std::string to_json_string() const;
};

// Parses and validates a JSON config document. Absent keys take defaults;
// unknown keys are rejected.
SimConfig load_config(const std::string& json_text);
SimConfig load_config_file(const std::string& path);

}  // namespace tdsim
