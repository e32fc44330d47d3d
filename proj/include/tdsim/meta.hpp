// Meta-learning agent: selects an SINR threshold in {10, 20, 30} dB each
// window; centralized ICS runs while the observed network SINR stays at or
// above the threshold, federated compression-only otherwise. Five
// interchangeable policies: Random, epsilon-greedy bandit, linear Thompson
// sampling, neural-linear Thompson sampling, and stateful DDQL.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "tdsim/agent_ca.hpp"
#include "tdsim/config.hpp"
#include "tdsim/nn.hpp"
#include "tdsim/rng.hpp"

namespace tdsim {

inline constexpr std::array<double, 3> kMetaThresholdsDb = {10.0, 20.0, 30.0};

enum class LearnedMode { CentralizedIcs, FederatedC };

struct MetaDecision {
  double gamma_db = 10.0;
  LearnedMode resulting_mode = LearnedMode::CentralizedIcs;
};

// Mean CA reward over all UEs and receptions in the window.
double meta_reward(const std::vector<double>& ca_rewards);

// Centralized ICS iff the network mean SINR is at least the threshold.
MetaDecision apply_threshold(double gamma_db, double network_mean_sinr_db);

// Per-UE (mean SINR, mean CA reward, mean E2E latency, mean mAP) over the
// window, flattened to 4N entries and normalized to [0,1].
struct MetaWindowUe {
  double mean_sinr_db = 0.0;
  double mean_ca_reward = 0.0;
  double mean_latency_ms = 0.0;
  double mean_map = 0.0;
};
Eigen::VectorXd build_meta_context(const std::vector<MetaWindowUe>& ues,
                                   const SimConfig& cfg);

// Nonstationary action-value update: q[a] += alpha * (reward - q[a]).
void eg_update(std::vector<double>& q, int action, double reward,
               double alpha);

// Uniform exploration with probability epsilon_eg, otherwise argmax with
// lowest-index tie-break.
int eg_select(const std::vector<double>& q, double epsilon_eg,
              std::mt19937_64& rng);

// Noise scale v_t = R_M * sqrt(9 d ln(t / rho)), with the log clamped at 0.
double lts_noise_scale(std::int64_t t, int d, double r_m, double rho);

struct LtsArmPosterior {
  Eigen::MatrixXd phi;        // I_d + sum x x^T over this arm's pulls
  Eigen::VectorXd b;          // sum x * reward
  Eigen::VectorXd theta_hat;  // phi^{-1} b

  explicit LtsArmPosterior(int d)
      : phi(Eigen::MatrixXd::Identity(d, d)),
        b(Eigen::VectorXd::Zero(d)),
        theta_hat(Eigen::VectorXd::Zero(d)) {}

  void update(const Eigen::VectorXd& x, double reward);

  // theta ~ N(theta_hat, v^2 phi^{-1}) via the Cholesky factor of phi.
  Eigen::VectorXd sample(double v, std::mt19937_64& rng) const;
};

// Shared LTS machinery: posteriors per arm plus the global step counter.
// The neural-linear variant feeds it extracted features instead of the raw
// context.
class LtsCore {
 public:
  LtsCore(int n_arms, int d, double r_m, double rho);

  int select(const Eigen::VectorXd& features, std::mt19937_64& rng);
  void update(const Eigen::VectorXd& features, int action, double reward);
  // Posterior-only ingestion (no step-counter advance), used when replayed
  // history is folded back in after a feature change.
  void ingest(const Eigen::VectorXd& features, int action, double reward);
  void reset_posteriors();

  const LtsArmPosterior& arm(int a) const { return arms_[a]; }
  LtsArmPosterior& mutable_arm(int a) { return arms_[a]; }
  int n_arms() const { return static_cast<int>(arms_.size()); }
  int dim() const { return d_; }
  std::int64_t t() const { return t_; }
  void set_t(std::int64_t t) { t_ = t; }

 private:
  std::vector<LtsArmPosterior> arms_;
  int d_;
  double r_m_, rho_;
  std::int64_t t_ = 1;
};

// Policy interface used by the runner's meta loop.
class MetaPolicy {
 public:
  virtual ~MetaPolicy() = default;
  virtual int select(const Eigen::VectorXd& context, bool training) = 0;
  virtual void learn(const Eigen::VectorXd& context, int action, double reward,
                     const Eigen::VectorXd& next_context) = 0;
  virtual std::string name() const = 0;
  virtual void save_state(const std::string& dir) const;
  virtual void load_state(const std::string& dir);
};

class RandomMetaPolicy : public MetaPolicy {
 public:
  explicit RandomMetaPolicy(std::mt19937_64 rng) : rng_(std::move(rng)) {}
  int select(const Eigen::VectorXd&, bool) override {
    return uniform_int(rng_, static_cast<int>(kMetaThresholdsDb.size()));
  }
  void learn(const Eigen::VectorXd&, int, double,
             const Eigen::VectorXd&) override {}
  std::string name() const override { return "R"; }

 private:
  std::mt19937_64 rng_;
};

class EgMetaPolicy : public MetaPolicy {
 public:
  EgMetaPolicy(double epsilon, double alpha, std::mt19937_64 rng)
      : q_(kMetaThresholdsDb.size(), 0.0),
        epsilon_(epsilon),
        alpha_(alpha),
        rng_(std::move(rng)) {}
  int select(const Eigen::VectorXd&, bool training) override {
    return eg_select(q_, training ? epsilon_ : 0.0, rng_);
  }
  void learn(const Eigen::VectorXd&, int action, double reward,
             const Eigen::VectorXd&) override {
    eg_update(q_, action, reward, alpha_);
  }
  std::string name() const override { return "EG"; }
  void save_state(const std::string& dir) const override;
  void load_state(const std::string& dir) override;
  const std::vector<double>& q() const { return q_; }

 private:
  std::vector<double> q_;
  double epsilon_, alpha_;
  std::mt19937_64 rng_;
};

class LtsMetaPolicy : public MetaPolicy {
 public:
  LtsMetaPolicy(int context_size, const SimConfig& cfg, std::mt19937_64 rng)
      : core_(static_cast<int>(kMetaThresholdsDb.size()), context_size,
              cfg.lts_rm, cfg.lts_rho),
        rng_(std::move(rng)) {}
  int select(const Eigen::VectorXd& context, bool) override {
    return core_.select(context, rng_);
  }
  void learn(const Eigen::VectorXd& context, int action, double reward,
             const Eigen::VectorXd&) override {
    core_.update(context, action, reward);
  }
  std::string name() const override { return "LTS"; }
  void save_state(const std::string& dir) const override;
  void load_state(const std::string& dir) override;
  const LtsCore& core() const { return core_; }
  LtsCore& core() { return core_; }

 private:
  LtsCore core_;
  std::mt19937_64 rng_;
};

// Neural-linear Thompson sampling: LTS on the last-hidden-layer features of
// a reward-regression network. The network is refit every t_nlts steps on
// the replayed history and the posteriors are rebuilt on the new features.
class NltsMetaPolicy : public MetaPolicy {
 public:
  NltsMetaPolicy(int context_size, const SimConfig& cfg,
                 std::mt19937_64 init_rng, std::mt19937_64 rng);
  // Custom extractor architecture (last entry is the head count).
  NltsMetaPolicy(std::vector<int> extractor_sizes, const SimConfig& cfg,
                 std::mt19937_64 init_rng, std::mt19937_64 rng);

  int select(const Eigen::VectorXd& context, bool) override;
  void learn(const Eigen::VectorXd& context, int action, double reward,
             const Eigen::VectorXd&) override;
  std::string name() const override { return "NLTS"; }
  void save_state(const std::string& dir) const override;
  void load_state(const std::string& dir) override;

  const LtsCore& core() const { return core_; }
  LtsCore& core() { return core_; }
  const Mlp& extractor() const { return extractor_; }
  Mlp& extractor() { return extractor_; }
  // Refit the extractor and rebuild posteriors from the replayed history.
  void retrain();

 private:
  struct Sample {
    Eigen::VectorXd context;
    int action;
    double reward;
  };

  Mlp extractor_;
  Adam extractor_opt_;
  LtsCore core_;
  std::deque<Sample> history_;
  int history_capacity_;
  int t_nlts_;
  int retrain_epochs_;
  int minibatch_;
  std::int64_t steps_ = 0;
  std::mt19937_64 rng_;
};

// Stateful variant: the shared DDQL machinery on the 4N-dimensional context.
class DdqlMetaPolicy : public MetaPolicy {
 public:
  DdqlMetaPolicy(int context_size, const SimConfig& cfg,
                 std::int64_t total_steps, std::mt19937_64 init_rng,
                 std::mt19937_64 explore_rng, std::mt19937_64 sample_rng)
      : agent_(context_size, cfg.meta_hidden,
               static_cast<int>(kMetaThresholdsDb.size()), cfg, total_steps,
               std::move(init_rng), std::move(explore_rng),
               std::move(sample_rng)) {}

  int select(const Eigen::VectorXd& context, bool training) override {
    return agent_.select_action(context, training);
  }
  void learn(const Eigen::VectorXd& context, int action, double reward,
             const Eigen::VectorXd& next_context) override {
    agent_.observe({context, action, reward, next_context, false});
    agent_.update();
  }
  std::string name() const override { return "DDQL"; }
  void save_state(const std::string& dir) const override;
  void load_state(const std::string& dir) override;
  DdqlAgent& agent() { return agent_; }

 private:
  DdqlAgent agent_;
};

std::unique_ptr<MetaPolicy> make_meta_policy(MetaAlgorithm algo,
                                             const SimConfig& cfg,
                                             std::int64_t total_meta_steps,
                                             std::uint64_t master_seed);

}  // namespace tdsim
