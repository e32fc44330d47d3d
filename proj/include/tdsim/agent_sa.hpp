// Scheduling Agent: shared-actor/critic PPO (centralized training,
// decentralized execution) choosing per-UE priority levels, plus the greedy
// allocator that turns priorities into OFDM-symbol grants.
#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "tdsim/config.hpp"
#include "tdsim/netsim.hpp"
#include "tdsim/nn.hpp"
#include "tdsim/rng.hpp"

namespace tdsim {

inline constexpr int kSaObsSize = 6;

// Eq.-style piecewise reward: 1 on deadline, otherwise a violation penalty
// (scaled by mAP and priority in cooperative mode).
double reward_sa(double latency_ms, double tau_ms, double map_value, int k,
                 Mode mode);

// 6-feature observation: mean SINR, mean MCS, mean buffer occupancy, symbols
// needed now, mean E2E latency, delivered application bytes (windowed,
// normalized).
Eigen::VectorXd build_sa_observation(const UeSnapshot& m, const SimConfig& cfg);

// Generalized advantage estimation by backward recursion.
// delta_t = r_t + gamma * V(s_{t+1}) - V(s_t), with V(s_T) = bootstrap_value.
std::vector<double> gae(const std::vector<double>& rewards,
                        const std::vector<double>& values,
                        double bootstrap_value, double gamma, double lambda);

// Grants OFDM symbols in decreasing priority order; ties rotate round-robin
// with the offset. Each visited UE gets min(demand, remaining budget).
std::vector<int> greedy_allocate(const std::vector<int>& priorities,
                                 const std::vector<std::int64_t>& demands,
                                 int symbol_budget, int rotation_offset);

// Fallback allocator when no scheduling agent is active: one symbol at a
// time, round-robin from the rotating offset, to UEs with remaining demand.
std::vector<int> equal_share_allocate(const std::vector<std::int64_t>& demands,
                                      int symbol_budget, int rotation_offset);

struct PpoDiag {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  bool updated = false;
};

struct PpoStep {
  Eigen::VectorXd obs;
  int action = 0;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  double next_value = 0.0;  // filled when the step completes
};

// One shared actor and critic trained on trajectories collected from N
// decentralized executors.
class PpoModel {
 public:
  PpoModel(int obs_size, const std::vector<int>& hidden, int n_actions,
           const SimConfig& cfg, std::mt19937_64 init_rng,
           std::mt19937_64 sample_rng);

  struct ActionSample {
    int action;
    double log_prob;
    double value;
  };

  // Stochastic draw from the policy during training, argmax otherwise.
  ActionSample act(const Eigen::VectorXd& obs, std::mt19937_64& rng,
                   bool training) const;

  Eigen::VectorXd policy(const Eigen::VectorXd& obs) const;
  double value(const Eigen::VectorXd& obs) const;

  // Stores a completed step for the given executor.
  void push_step(int agent_id, PpoStep step);

  // True once every executor holds a full trajectory of t_ppo steps.
  bool ready() const;

  // Clipped-surrogate update over the combined N x T_PPO batch; consumes the
  // collected trajectories.
  PpoDiag update();

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  std::int64_t updates() const { return updates_; }

 private:
  int n_actions_;
  double gamma_, lambda_, clip_, c1_, c2_;
  int epochs_, minibatch_, t_ppo_;
  bool normalize_advantages_;
  Mlp actor_;
  Mlp critic_;
  Adam actor_opt_;
  Adam critic_opt_;
  std::vector<std::deque<PpoStep>> trajectories_;
  std::mt19937_64 sample_rng_;
  std::int64_t updates_ = 0;
};

}  // namespace tdsim
