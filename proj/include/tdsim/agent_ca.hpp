// Compression Agent: DDQL over the three compression configurations, with
// centralized and decentralized state builders, mode-dependent rewards,
// replay, epsilon-greedy exploration and target-network sync. The same DDQL
// machinery also backs the stateful meta-learning agent.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tdsim/config.hpp"
#include "tdsim/netsim.hpp"
#include "tdsim/nn.hpp"
#include "tdsim/rng.hpp"

namespace tdsim {

inline constexpr int kCaStateSize = 16;

struct Transition {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

// Ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity) : capacity_(capacity) {}

  void push(Transition t) {
    if (static_cast<int>(ring_.size()) < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  int size() const { return static_cast<int>(ring_.size()); }
  const Transition& sample(std::mt19937_64& rng) const {
    return ring_[uniform_int(rng, size())];
  }
  const Transition& at(int i) const { return ring_[i]; }

 private:
  int capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> ring_;
};

// Linear decay from epsilon_start to epsilon_min over the first
// decay_fraction of total steps, flat afterwards.
class EpsilonSchedule {
 public:
  EpsilonSchedule() = default;
  EpsilonSchedule(double start, double floor, double decay_fraction,
                  std::int64_t total_steps)
      : start_(start), floor_(floor),
        decay_steps_(static_cast<std::int64_t>(decay_fraction * total_steps)) {}

  double at(std::int64_t step) const {
    if (decay_steps_ <= 0) return floor_;
    if (step >= decay_steps_) return floor_;
    return start_ - (start_ - floor_) * static_cast<double>(step) /
                        static_cast<double>(decay_steps_);
  }

 private:
  double start_ = 1.0;
  double floor_ = 0.01;
  std::int64_t decay_steps_ = 0;
};

// Eq.-style piecewise reward: m_a when the deadline holds, otherwise a
// latency penalty, discounted by the priority level in cooperative mode.
double reward_ca(double latency_ms, double tau_ms, double map_value, Mode mode,
                 int k);

// 16-feature state builders. Zero-filled measurement windows yield zero
// features; instantaneous channel features are zero until the first sample.
Eigen::VectorXd build_centralized_state(const UeSnapshot& m,
                                        const SimConfig& cfg);
Eigen::VectorXd build_decentralized_state(const UeSnapshot& m,
                                          const SimConfig& cfg);

struct DdqlDiag {
  double loss = 0.0;
  bool updated = false;
};

class DdqlAgent {
 public:
  DdqlAgent(int input_size, const std::vector<int>& hidden, int n_actions,
            const SimConfig& cfg, std::int64_t total_training_steps,
            std::mt19937_64 init_rng, std::mt19937_64 explore_rng,
            std::mt19937_64 sample_rng);

  // Epsilon-greedy over the Q-values during training; pure argmax otherwise.
  // Ties break toward the lowest action index.
  int select_action(const Eigen::VectorXd& state, bool training);

  // Records a completed transition; counts as one learning step.
  void observe(Transition t);

  // One minibatch update if the buffer holds at least `minibatch` samples;
  // refreshes the target network every t_ddql updates.
  DdqlDiag update();

  double epsilon() const { return schedule_.at(steps_); }
  std::int64_t steps() const { return steps_; }
  std::int64_t updates() const { return updates_; }
  const Mlp& q_net() const { return q_net_; }
  Mlp& q_net() { return q_net_; }
  const Mlp& target_net() const { return target_net_; }
  Mlp& target_net() { return target_net_; }
  void set_nets(const Mlp& q, const Mlp& target) {
    q_net_ = q;
    target_net_ = target;
  }
  int n_actions() const { return n_actions_; }
  const ReplayBuffer& replay() const { return replay_; }

 private:
  int n_actions_;
  double gamma_;
  int minibatch_;
  int t_sync_;
  Mlp q_net_;
  Mlp target_net_;
  Adam optimizer_;
  ReplayBuffer replay_;
  EpsilonSchedule schedule_;
  std::int64_t steps_ = 0;
  std::int64_t updates_ = 0;
  std::mt19937_64 explore_rng_;
  std::mt19937_64 sample_rng_;
};

// Federated averaging round over per-UE agents: Q and target networks are
// both replaced by their elementwise means.
void fedavg_round(std::vector<DdqlAgent>& agents);

}  // namespace tdsim
