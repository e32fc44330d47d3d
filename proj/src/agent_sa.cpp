#include "tdsim/agent_sa.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace tdsim {

double reward_sa(double latency_ms, double tau_ms, double map_value, int k,
                 Mode mode) {
  if (latency_ms <= tau_ms) return 1.0;
  if (mode == Mode::CCS) {
    assert(k >= 1);
    return -((latency_ms - tau_ms) * map_value) / (100.0 * k);
  }
  return -(latency_ms - tau_ms) / 100.0;
}

Eigen::VectorXd build_sa_observation(const UeSnapshot& m,
                                     const SimConfig& cfg) {
  const double sinr_span = cfg.norm_sinr_max_db - cfg.norm_sinr_min_db;
  const double max_frame_bits =
      frame_size_bits(compression_table().back(), cfg.lidar_fps);
  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };

  Eigen::VectorXd v(kSaObsSize);
  v[0] = m.channel_valid
             ? clamp01((m.window_mean_sinr_db - cfg.norm_sinr_min_db) /
                       sinr_span)
             : 0.0;
  v[1] = m.channel_valid ? clamp01(m.window_mean_mcs / 28.0) : 0.0;
  v[2] = clamp01(m.occupancy_bits.mean /
                 (cfg.norm_occupancy_frames * max_frame_bits));
  v[3] = clamp01(m.symbols_needed / cfg.norm_symbols_max);
  v[4] = clamp01(m.app_latency.mean / cfg.norm_latency_max_ms);
  v[5] = clamp01(m.window_delivered_bytes /
                 (cfg.layer_stats_window * max_frame_bits / 8.0));
  return v;
}

std::vector<double> gae(const std::vector<double>& rewards,
                        const std::vector<double>& values,
                        double bootstrap_value, double gamma, double lambda) {
  assert(rewards.size() == values.size());
  const int T = static_cast<int>(rewards.size());
  std::vector<double> adv(T, 0.0);
  double running = 0.0;
  for (int t = T - 1; t >= 0; --t) {
    const double next_v = (t + 1 < T) ? values[t + 1] : bootstrap_value;
    const double delta = rewards[t] + gamma * next_v - values[t];
    running = delta + gamma * lambda * running;
    adv[t] = running;
  }
  return adv;
}

std::vector<int> greedy_allocate(const std::vector<int>& priorities,
                                 const std::vector<std::int64_t>& demands,
                                 int symbol_budget, int rotation_offset) {
  assert(priorities.size() == demands.size());
  const int n = static_cast<int>(demands.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rot = [&](int u) { return (u - rotation_offset % n + n) % n; };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (priorities[a] != priorities[b]) return priorities[a] > priorities[b];
    return rot(a) < rot(b);
  });

  std::vector<int> grants(n, 0);
  int remaining = symbol_budget;
  for (int u : order) {
    if (remaining <= 0) break;
    const int g = static_cast<int>(
        std::min<std::int64_t>(demands[u], remaining));
    grants[u] = g;
    remaining -= g;
  }
  return grants;
}

std::vector<int> equal_share_allocate(const std::vector<std::int64_t>& demands,
                                      int symbol_budget, int rotation_offset) {
  const int n = static_cast<int>(demands.size());
  std::vector<int> grants(n, 0);
  std::int64_t total_demand = 0;
  for (auto d : demands) total_demand += d;
  int remaining = std::min<std::int64_t>(symbol_budget, total_demand);
  int u = n > 0 ? rotation_offset % n : 0;
  while (remaining > 0) {
    if (grants[u] < demands[u]) {
      grants[u] += 1;
      remaining -= 1;
    }
    u = (u + 1) % n;
  }
  return grants;
}

PpoModel::PpoModel(int obs_size, const std::vector<int>& hidden, int n_actions,
                   const SimConfig& cfg, std::mt19937_64 init_rng,
                   std::mt19937_64 sample_rng)
    : n_actions_(n_actions),
      gamma_(cfg.gamma),
      lambda_(cfg.gae_lambda),
      clip_(cfg.ppo_clip),
      c1_(cfg.ppo_c1),
      c2_(cfg.ppo_c2),
      epochs_(cfg.ppo_epochs),
      minibatch_(cfg.minibatch),
      t_ppo_(cfg.t_ppo),
      normalize_advantages_(cfg.advantage_normalization),
      trajectories_(cfg.n_ues),
      sample_rng_(std::move(sample_rng)) {
  std::vector<int> actor_sizes{obs_size};
  actor_sizes.insert(actor_sizes.end(), hidden.begin(), hidden.end());
  actor_sizes.push_back(n_actions);
  actor_ = Mlp(actor_sizes, init_rng);

  std::vector<int> critic_sizes{obs_size};
  critic_sizes.insert(critic_sizes.end(), hidden.begin(), hidden.end());
  critic_sizes.push_back(1);
  critic_ = Mlp(critic_sizes, init_rng);

  actor_opt_ = Adam(actor_, cfg.learning_rate);
  critic_opt_ = Adam(critic_, cfg.learning_rate);
}

Eigen::VectorXd PpoModel::policy(const Eigen::VectorXd& obs) const {
  return softmax(actor_.forward_vec(obs));
}

double PpoModel::value(const Eigen::VectorXd& obs) const {
  return critic_.forward_vec(obs)[0];
}

PpoModel::ActionSample PpoModel::act(const Eigen::VectorXd& obs,
                                     std::mt19937_64& rng,
                                     bool training) const {
  const Eigen::VectorXd logp = log_softmax(actor_.forward_vec(obs));
  int action = 0;
  if (training) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (int a = 0; a < n_actions_; ++a) {
      acc += std::exp(logp[a]);
      if (u < acc || a == n_actions_ - 1) {
        action = a;
        break;
      }
    }
  } else {
    for (int a = 1; a < n_actions_; ++a)
      if (logp[a] > logp[action]) action = a;
  }
  return {action, logp[action], value(obs)};
}

void PpoModel::push_step(int agent_id, PpoStep step) {
  trajectories_[agent_id].push_back(std::move(step));
}

bool PpoModel::ready() const {
  for (const auto& tr : trajectories_)
    if (static_cast<int>(tr.size()) < t_ppo_) return false;
  return true;
}

PpoDiag PpoModel::update() {
  PpoDiag diag;
  // Consume exactly t_ppo steps per executor; leftovers start the next round.
  std::vector<Eigen::VectorXd> obs;
  std::vector<int> actions;
  std::vector<double> logp_old, advantages, returns;
  for (auto& tr : trajectories_) {
    std::vector<double> rewards, values;
    rewards.reserve(t_ppo_);
    values.reserve(t_ppo_);
    for (int t = 0; t < t_ppo_; ++t) {
      rewards.push_back(tr[t].reward);
      values.push_back(tr[t].value);
    }
    const double bootstrap = tr[t_ppo_ - 1].next_value;
    const auto adv = gae(rewards, values, bootstrap, gamma_, lambda_);
    for (int t = 0; t < t_ppo_; ++t) {
      obs.push_back(tr[t].obs);
      actions.push_back(tr[t].action);
      logp_old.push_back(tr[t].log_prob);
      advantages.push_back(adv[t]);
      returns.push_back(adv[t] + values[t]);
    }
    tr.erase(tr.begin(), tr.begin() + t_ppo_);
  }
  const int B = static_cast<int>(obs.size());
  if (B == 0) return diag;

  if (normalize_advantages_) {
    double mean = 0.0;
    for (double a : advantages) mean += a;
    mean /= B;
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / B) + 1e-8;
    for (double& a : advantages) a = (a - mean) / sd;
  }

  std::vector<int> index(B);
  std::iota(index.begin(), index.end(), 0);

  double sum_pl = 0.0, sum_vl = 0.0, sum_ent = 0.0;
  int n_minibatches = 0;

  for (int epoch = 0; epoch < epochs_; ++epoch) {
    // Fisher-Yates shuffle on the local engine for reproducibility.
    for (int i = B - 1; i > 0; --i)
      std::swap(index[i], index[uniform_int(sample_rng_, i + 1)]);

    for (int start = 0; start < B; start += minibatch_) {
      const int m = std::min(minibatch_, B - start);
      Eigen::MatrixXd X(obs[0].size(), m);
      for (int i = 0; i < m; ++i) X.col(i) = obs[index[start + i]];

      Mlp::Cache actor_cache, critic_cache;
      const Eigen::MatrixXd logits = actor_.forward(X, &actor_cache);
      const Eigen::MatrixXd values = critic_.forward(X, &critic_cache);

      Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(n_actions_, m);
      Eigen::MatrixXd dvalue(1, m);
      double pl = 0.0, vl = 0.0, ent = 0.0;

      for (int i = 0; i < m; ++i) {
        const int idx = index[start + i];
        const int a = actions[idx];
        const double A = advantages[idx];

        const Eigen::VectorXd logp = log_softmax(logits.col(i));
        const Eigen::VectorXd pi = logp.array().exp();
        const double ratio = std::exp(logp[a] - logp_old[idx]);

        const double unclipped = ratio * A;
        const double clipped =
            std::clamp(ratio, 1.0 - clip_, 1.0 + clip_) * A;
        pl += -std::min(unclipped, clipped);

        // Gradient of the surrogate flows only where the unclipped branch
        // is active.
        const bool pass_through = (A >= 0.0 && ratio <= 1.0 + clip_) ||
                                  (A < 0.0 && ratio >= 1.0 - clip_);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n_actions_);
        if (pass_through) {
          const double dsurr_dlogp = ratio * A;
          Eigen::VectorXd onehot = Eigen::VectorXd::Zero(n_actions_);
          onehot[a] = 1.0;
          g -= dsurr_dlogp * (onehot - pi);  // minimize -surrogate
        }

        double S = 0.0;
        for (int j = 0; j < n_actions_; ++j) S -= pi[j] * logp[j];
        ent += S;
        for (int j = 0; j < n_actions_; ++j)
          g[j] -= c2_ * (-pi[j] * (logp[j] + S));  // minimize -c2 * entropy

        dlogits.col(i) = g / m;

        const double verr = values(0, i) - returns[idx];
        vl += verr * verr;
        dvalue(0, i) = c1_ * 2.0 * verr / m;
      }

      const Mlp::Grads actor_grads = actor_.backward(actor_cache, dlogits);
      const Mlp::Grads critic_grads = critic_.backward(critic_cache, dvalue);
      actor_opt_.step(actor_, actor_grads);
      critic_opt_.step(critic_, critic_grads);

      sum_pl += pl / m;
      sum_vl += vl / m;
      sum_ent += ent / m;
      n_minibatches += 1;
    }
  }

  updates_ += 1;
  diag.policy_loss = sum_pl / n_minibatches;
  diag.value_loss = sum_vl / n_minibatches;
  diag.entropy = sum_ent / n_minibatches;
  diag.updated = true;
  return diag;
}

}  // namespace tdsim
