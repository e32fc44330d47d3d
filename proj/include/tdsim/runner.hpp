// Experiment runner: composes channel + queues + application + agents per
// the configured mode, runs training/evaluation campaigns, and persists
// per-episode metrics, checkpoints and summaries.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdsim/agent_ca.hpp"
#include "tdsim/agent_sa.hpp"
#include "tdsim/config.hpp"
#include "tdsim/meta.hpp"
#include "tdsim/netsim.hpp"

namespace tdsim {

// Linear-interpolation quantile (the plotting-stack convention) on sorted
// data, p in [0,1].
double quantile_linear(const std::vector<double>& sorted, double p);

struct BoxplotSummary {
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_lo = 0.0;  // lowest datum within 1.5 IQR below q1
  double whisker_hi = 0.0;  // highest datum within 1.5 IQR above q3
  int n_outliers = 0;
};

BoxplotSummary summarize(std::vector<double> values);

struct EpisodeMetrics {
  int episode = 0;
  double ca_reward_mean = 0.0;
  double sa_reward_mean = 0.0;
  double meta_reward_mean = 0.0;
  BoxplotSummary latency;
  double latency_std = 0.0;
  double map_mean = 0.0;
  double deadline_hit_prob = 0.0;
  double frac_centralized = 1.0;
  std::int64_t deliveries = 0;
  std::array<std::int64_t, 3> ca_action_counts{0, 0, 0};
  std::array<std::int64_t, 3> meta_action_counts{0, 0, 0};
};

struct MetaDecisionRow {
  std::int64_t window = 0;
  double gamma_db = 0.0;
  double mean_sinr_db = 0.0;
  bool centralized = false;
  double reward = 0.0;
};

// Owns the agents for one experiment arm; episodes share them, each episode
// runs on a fresh engine (simulation restart).
class Experiment {
 public:
  explicit Experiment(const SimConfig& cfg);

  EpisodeMetrics run_episode(bool training);
  std::vector<EpisodeMetrics> train(int episodes);

  void save_checkpoints(const std::string& dir) const;
  void load_checkpoints(const std::string& dir);

  const SimConfig& config() const { return cfg_; }

  // Diagnostic sinks (optional).
  std::function<void(std::int64_t, const PpoDiag&)> on_sa_update;
  std::function<void(const MetaDecisionRow&)> on_meta_decision;
  std::function<void(const SlotTrace&)> on_slot_trace;

 private:
  struct PendingStep {
    bool has_reward = false;
    bool has_next = false;
    bool centralized_branch = true;  // branch that made the decision (META)
    Eigen::VectorXd cent_state, cent_next;
    Eigen::VectorXd dec_state, dec_next;
    double ca_reward = 0.0;
    int ca_action = 0;
    bool sa_active = false;
    Eigen::VectorXd sa_obs, sa_next_obs;
    int sa_action = 0;
    double sa_logp = 0.0;
    double sa_value = 0.0;
    double sa_reward = 0.0;
  };

  struct MetaWindowAcc {
    std::deque<double> sinr, reward, latency, map;
    int count = 0;
  };

  bool sa_enabled() const;
  bool centralized_ca_enabled() const;
  bool federated_ca_enabled() const;
  bool ca_decisions_centralized() const;  // which branch currently decides

  void make_decision(int ue, Engine& engine, bool training,
                     EpisodeMetrics& m);
  void handle_delivery(const DeliveryRecord& rec, Engine& engine,
                       bool training, EpisodeMetrics& m,
                       std::vector<double>& latencies);
  void try_complete(int ue, std::uint64_t seq, bool training);
  void close_meta_window(bool training, EpisodeMetrics& m);

  SimConfig cfg_;
  std::optional<DdqlAgent> ca_central_;
  std::vector<DdqlAgent> ca_federated_;
  std::optional<PpoModel> sa_;
  std::unique_ptr<MetaPolicy> meta_;

  std::mt19937_64 sa_act_rng_;
  LearnedMode meta_mode_ = LearnedMode::CentralizedIcs;
  bool meta_has_prev_ = false;
  Eigen::VectorXd meta_prev_context_;
  int meta_prev_action_ = 0;
  std::int64_t meta_window_index_ = 0;

  std::int64_t episode_counter_ = 0;
  std::int64_t rotation_offset_ = 0;

  // Per-episode transient state.
  std::vector<std::map<std::uint64_t, PendingStep>> pending_;
  std::vector<int> current_priority_;
  std::vector<MetaWindowAcc> meta_acc_;
  std::vector<double> ca_reward_acc_;
  std::vector<double> sa_reward_acc_;
  std::vector<double> meta_reward_acc_;
  std::int64_t centralized_windows_ = 0;
  std::int64_t total_windows_ = 0;
};

struct CampaignResult {
  std::vector<EpisodeMetrics> episodes;
  std::string out_dir;  // empty for in-memory runs
};

// Trains cfg.episodes episodes; when out_dir is nonempty, writes the
// resolved config snapshot, metrics.csv, summary.json, checkpoints and
// diagnostic logs there.
CampaignResult run_campaign(const SimConfig& cfg, const std::string& out_dir);

// Loads checkpoints from a campaign directory and runs evaluation episodes
// (greedy policies, no updates).
CampaignResult run_eval(const std::string& checkpoint_dir, int episodes);

// Tail-mean helper over the last n episodes of a metric.
double tail_mean(const std::vector<EpisodeMetrics>& eps, int tail,
                 double EpisodeMetrics::* field);

std::string metrics_csv_header();
std::string metrics_csv_row(const EpisodeMetrics& m);
void write_summary_json(const std::string& path,
                        const std::vector<EpisodeMetrics>& eps, int tail);

}  // namespace tdsim
