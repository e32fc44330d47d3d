#include "tdsim/agent_ca.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace tdsim {

double reward_ca(double latency_ms, double tau_ms, double map_value, Mode mode,
                 int k) {
  if (latency_ms <= tau_ms) return map_value;
  if (mode == Mode::CCS) {
    assert(k >= 1);
    return -latency_ms / (100.0 * k);
  }
  return -latency_ms / 100.0;
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

struct Norms {
  double sinr_lo, sinr_span, latency_max, occupancy_max, symbols_max;
  explicit Norms(const SimConfig& cfg)
      : sinr_lo(cfg.norm_sinr_min_db),
        sinr_span(cfg.norm_sinr_max_db - cfg.norm_sinr_min_db),
        latency_max(cfg.norm_latency_max_ms),
        occupancy_max(cfg.norm_occupancy_frames *
                      frame_size_bits(compression_table().back(),
                                      cfg.lidar_fps)),
        symbols_max(cfg.norm_symbols_max) {}

  double sinr(double db) const { return clamp01((db - sinr_lo) / sinr_span); }
  double latency(double ms) const { return clamp01(ms / latency_max); }
  double occupancy(double bits) const { return clamp01(bits / occupancy_max); }
  double symbols(double s) const { return clamp01(s / symbols_max); }
};

void put_stat4(Eigen::VectorXd& v, int& i, const Stat4& s,
               double (Norms::*f)(double) const, const Norms& n) {
  v[i++] = (n.*f)(s.mean);
  v[i++] = (n.*f)(s.std);
  v[i++] = (n.*f)(s.min);
  v[i++] = (n.*f)(s.max);
}

void put_prr4(Eigen::VectorXd& v, int& i, const Stat4& s) {
  v[i++] = clamp01(s.mean);
  v[i++] = clamp01(s.std);
  v[i++] = clamp01(s.min);
  v[i++] = clamp01(s.max);
}

}  // namespace

Eigen::VectorXd build_centralized_state(const UeSnapshot& m,
                                        const SimConfig& cfg) {
  const Norms n(cfg);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kCaStateSize);
  int i = 0;
  if (m.channel_valid) {
    v[i++] = n.sinr(m.sinr_db);
    v[i++] = clamp01(m.mcs / 28.0);
    v[i++] = n.symbols(m.symbols_needed);
  } else {
    i = 3;
  }
  put_stat4(v, i, m.app_latency, &Norms::latency, n);
  put_prr4(v, i, m.app_prr);
  put_stat4(v, i, m.phy_latency, &Norms::latency, n);
  v[i++] = clamp01(m.phy_prr_mean);
  assert(i == kCaStateSize);
  return v;
}

Eigen::VectorXd build_decentralized_state(const UeSnapshot& m,
                                          const SimConfig& cfg) {
  const Norms n(cfg);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kCaStateSize);
  int i = 0;
  if (m.channel_valid) {
    v[i++] = n.sinr(m.sinr_db);
    v[i++] = clamp01(m.mcs / 28.0);
    v[i++] = n.symbols(m.symbols_needed);
  } else {
    i = 3;
  }
  put_stat4(v, i, m.app_latency, &Norms::latency, n);
  put_prr4(v, i, m.app_prr);
  put_stat4(v, i, m.occupancy_bits, &Norms::occupancy, n);
  v[i++] = n.occupancy(m.occupancy_instant_bits);
  assert(i == kCaStateSize);
  return v;
}

DdqlAgent::DdqlAgent(int input_size, const std::vector<int>& hidden,
                     int n_actions, const SimConfig& cfg,
                     std::int64_t total_training_steps,
                     std::mt19937_64 init_rng, std::mt19937_64 explore_rng,
                     std::mt19937_64 sample_rng)
    : n_actions_(n_actions),
      gamma_(cfg.gamma),
      minibatch_(cfg.minibatch),
      t_sync_(cfg.t_ddql),
      replay_(cfg.replay_capacity),
      schedule_(cfg.epsilon_start, cfg.epsilon_min, cfg.epsilon_decay_fraction,
                total_training_steps),
      explore_rng_(std::move(explore_rng)),
      sample_rng_(std::move(sample_rng)) {
  std::vector<int> sizes;
  sizes.push_back(input_size);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(n_actions);
  q_net_ = Mlp(sizes, init_rng);
  target_net_ = q_net_;
  optimizer_ = Adam(q_net_, cfg.learning_rate);
}

int DdqlAgent::select_action(const Eigen::VectorXd& state, bool training) {
  if (training && uniform01(explore_rng_) < epsilon())
    return uniform_int(explore_rng_, n_actions_);
  const Eigen::VectorXd q = q_net_.forward_vec(state);
  int best = 0;
  for (int a = 1; a < n_actions_; ++a)
    if (q[a] > q[best]) best = a;
  return best;
}

void DdqlAgent::observe(Transition t) {
  replay_.push(std::move(t));
  steps_ += 1;
}

DdqlDiag DdqlAgent::update() {
  DdqlDiag diag;
  if (replay_.size() < minibatch_) return diag;

  const int M = minibatch_;
  const int in = q_net_.input_size();
  Eigen::MatrixXd states(in, M), next_states(in, M);
  std::vector<int> actions(M);
  Eigen::VectorXd rewards(M);
  std::vector<bool> done(M);
  for (int i = 0; i < M; ++i) {
    const Transition& t = replay_.sample(sample_rng_);
    states.col(i) = t.state;
    next_states.col(i) = t.next_state;
    actions[i] = t.action;
    rewards[i] = t.reward;
    done[i] = t.done;
  }

  // y = r + gamma * max_a' Q_target(s', a'); no bootstrap on terminal cuts.
  const Eigen::MatrixXd q_next = target_net_.forward(next_states);
  Eigen::VectorXd y(M);
  for (int i = 0; i < M; ++i) {
    const double boot = done[i] ? 0.0 : gamma_ * q_next.col(i).maxCoeff();
    y[i] = rewards[i] + boot;
  }

  Mlp::Cache cache;
  const Eigen::MatrixXd q = q_net_.forward(states, &cache);
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (int i = 0; i < M; ++i) {
    const double err = q(actions[i], i) - y[i];
    loss += err * err;
    dq(actions[i], i) = 2.0 * err / M;
  }
  loss /= M;

  const Mlp::Grads grads = q_net_.backward(cache, dq);
  optimizer_.step(q_net_, grads);
  updates_ += 1;
  if (updates_ % t_sync_ == 0) target_net_ = q_net_;

  diag.loss = loss;
  diag.updated = true;
  return diag;
}

void fedavg_round(std::vector<DdqlAgent>& agents) {
  if (agents.size() < 2) return;
  std::vector<const Mlp*> qs, targets;
  qs.reserve(agents.size());
  targets.reserve(agents.size());
  for (const auto& a : agents) {
    qs.push_back(&a.q_net());
    targets.push_back(&a.target_net());
  }
  const Mlp q_avg = fedavg(qs);
  const Mlp t_avg = fedavg(targets);
  for (auto& a : agents) a.set_nets(q_avg, t_avg);
}

}  // namespace tdsim
