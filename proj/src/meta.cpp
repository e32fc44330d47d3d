#include "tdsim/meta.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <json.hpp>

namespace tdsim {

using nlohmann::json;

double meta_reward(const std::vector<double>& ca_rewards) {
  assert(!ca_rewards.empty());
  double sum = 0.0;
  for (double r : ca_rewards) sum += r;
  return sum / ca_rewards.size();
}

MetaDecision apply_threshold(double gamma_db, double network_mean_sinr_db) {
  MetaDecision d;
  d.gamma_db = gamma_db;
  d.resulting_mode = network_mean_sinr_db >= gamma_db
                         ? LearnedMode::CentralizedIcs
                         : LearnedMode::FederatedC;
  return d;
}

Eigen::VectorXd build_meta_context(const std::vector<MetaWindowUe>& ues,
                                   const SimConfig& cfg) {
  const double sinr_span = cfg.norm_sinr_max_db - cfg.norm_sinr_min_db;
  const double reward_span = 1.0 - cfg.norm_reward_min;
  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };

  Eigen::VectorXd v(4 * ues.size());
  int i = 0;
  for (const auto& u : ues) {
    v[i++] = clamp01((u.mean_sinr_db - cfg.norm_sinr_min_db) / sinr_span);
    v[i++] = clamp01((u.mean_ca_reward - cfg.norm_reward_min) / reward_span);
    v[i++] = clamp01(u.mean_latency_ms / cfg.norm_latency_max_ms);
    v[i++] = clamp01(u.mean_map);
  }
  return v;
}

void eg_update(std::vector<double>& q, int action, double reward,
               double alpha) {
  assert(action >= 0 && action < static_cast<int>(q.size()));
  assert(alpha > 0.0 && alpha <= 1.0);
  q[action] += alpha * (reward - q[action]);
}

int eg_select(const std::vector<double>& q, double epsilon_eg,
              std::mt19937_64& rng) {
  if (epsilon_eg > 0.0 && uniform01(rng) < epsilon_eg)
    return uniform_int(rng, static_cast<int>(q.size()));
  int best = 0;
  for (int a = 1; a < static_cast<int>(q.size()); ++a)
    if (q[a] > q[best]) best = a;
  return best;
}

double lts_noise_scale(std::int64_t t, int d, double r_m, double rho) {
  assert(t >= 1);
  const double log_term = std::max(0.0, std::log(static_cast<double>(t) / rho));
  return r_m * std::sqrt(9.0 * d * log_term);
}

void LtsArmPosterior::update(const Eigen::VectorXd& x, double reward) {
  phi.noalias() += x * x.transpose();
  b.noalias() += x * reward;
  theta_hat = phi.ldlt().solve(b);
}

Eigen::VectorXd LtsArmPosterior::sample(double v, std::mt19937_64& rng) const {
  Eigen::VectorXd z(theta_hat.size());
  for (int i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  if (v == 0.0) return theta_hat;
  // With phi = L L^T, the solve L^T w = z gives Cov(w) = phi^{-1}.
  const Eigen::LLT<Eigen::MatrixXd> llt(phi);
  const Eigen::VectorXd w =
      llt.matrixU().solve(z);  // upper-triangular solve: L^T w = z
  return theta_hat + v * w;
}

LtsCore::LtsCore(int n_arms, int d, double r_m, double rho)
    : d_(d), r_m_(r_m), rho_(rho) {
  arms_.reserve(n_arms);
  for (int a = 0; a < n_arms; ++a) arms_.emplace_back(d);
}

int LtsCore::select(const Eigen::VectorXd& features, std::mt19937_64& rng) {
  const double v = lts_noise_scale(t_, d_, r_m_, rho_);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < static_cast<int>(arms_.size()); ++a) {
    const Eigen::VectorXd theta = arms_[a].sample(v, rng);
    const double score = features.dot(theta);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

void LtsCore::update(const Eigen::VectorXd& features, int action,
                     double reward) {
  arms_[action].update(features, reward);
  t_ += 1;
}

void LtsCore::ingest(const Eigen::VectorXd& features, int action,
                     double reward) {
  arms_[action].update(features, reward);
}

void LtsCore::reset_posteriors() {
  for (auto& arm : arms_) arm = LtsArmPosterior(d_);
}

NltsMetaPolicy::NltsMetaPolicy(int context_size, const SimConfig& cfg,
                               std::mt19937_64 init_rng, std::mt19937_64 rng)
    : NltsMetaPolicy(
          [&] {
            std::vector<int> sizes{context_size};
            sizes.insert(sizes.end(), cfg.meta_hidden.begin(),
                         cfg.meta_hidden.end());
            sizes.push_back(static_cast<int>(kMetaThresholdsDb.size()));
            return sizes;
          }(),
          cfg, std::move(init_rng), std::move(rng)) {}

NltsMetaPolicy::NltsMetaPolicy(std::vector<int> extractor_sizes,
                               const SimConfig& cfg, std::mt19937_64 init_rng,
                               std::mt19937_64 rng)
    : extractor_(extractor_sizes, init_rng),
      extractor_opt_(extractor_, cfg.learning_rate),
      core_(static_cast<int>(kMetaThresholdsDb.size()),
            extractor_sizes[extractor_sizes.size() - 2], cfg.lts_rm,
            cfg.lts_rho),
      history_capacity_(cfg.nlts_history_capacity),
      t_nlts_(cfg.t_nlts),
      retrain_epochs_(cfg.nlts_retrain_epochs),
      minibatch_(cfg.minibatch),
      rng_(std::move(rng)) {
  if (extractor_sizes.size() < 3)
    throw std::invalid_argument("NLTS extractor needs a hidden layer");
}

int NltsMetaPolicy::select(const Eigen::VectorXd& context, bool) {
  return core_.select(extractor_.last_hidden(context), rng_);
}

void NltsMetaPolicy::learn(const Eigen::VectorXd& context, int action,
                           double reward, const Eigen::VectorXd&) {
  core_.update(extractor_.last_hidden(context), action, reward);
  history_.push_back({context, action, reward});
  if (static_cast<int>(history_.size()) > history_capacity_)
    history_.pop_front();
  steps_ += 1;
  if (steps_ % t_nlts_ == 0) retrain();
}

void NltsMetaPolicy::retrain() {
  const int n = static_cast<int>(history_.size());
  if (n == 0) return;

  // Regress observed rewards on contexts; only the taken arm's head carries
  // gradient, mirroring the DDQL-style masked MSE.
  for (int epoch = 0; epoch < retrain_epochs_; ++epoch) {
    for (int start = 0; start < n; start += minibatch_) {
      const int m = std::min(minibatch_, n - start);
      Eigen::MatrixXd X(extractor_.input_size(), m);
      for (int i = 0; i < m; ++i) X.col(i) = history_[start + i].context;
      Mlp::Cache cache;
      const Eigen::MatrixXd pred = extractor_.forward(X, &cache);
      Eigen::MatrixXd dpred = Eigen::MatrixXd::Zero(pred.rows(), m);
      for (int i = 0; i < m; ++i) {
        const auto& s = history_[start + i];
        dpred(s.action, i) = 2.0 * (pred(s.action, i) - s.reward) / m;
      }
      extractor_opt_.step(extractor_, extractor_.backward(cache, dpred));
    }
  }

  // Features changed meaning: rebuild every posterior from the replay.
  core_.reset_posteriors();
  for (const auto& s : history_)
    core_.ingest(extractor_.last_hidden(s.context), s.action, s.reward);
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

Eigen::MatrixXd mat_from_json(const json& a) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows > 0 ? static_cast<int>(a[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = a[r][c].get<double>();
  return m;
}

json lts_core_to_json(const LtsCore& core) {
  json j;
  j["t"] = core.t();
  json arms = json::array();
  for (int a = 0; a < core.n_arms(); ++a) {
    const auto& arm = core.arm(a);
    arms.push_back({{"phi", mat_to_json(arm.phi)},
                    {"b", vec_to_json(arm.b)},
                    {"theta_hat", vec_to_json(arm.theta_hat)}});
  }
  j["arms"] = arms;
  return j;
}

void lts_core_from_json(LtsCore& core, const json& j) {
  core.set_t(j.at("t").get<std::int64_t>());
  const auto& arms = j.at("arms");
  for (int a = 0; a < core.n_arms(); ++a) {
    auto& arm = core.mutable_arm(a);
    arm.phi = mat_from_json(arms[a].at("phi"));
    arm.b = vec_from_json(arms[a].at("b"));
    arm.theta_hat = vec_from_json(arms[a].at("theta_hat"));
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for write");
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  in >> j;
  return j;
}

}  // namespace

void MetaPolicy::save_state(const std::string&) const {}
void MetaPolicy::load_state(const std::string&) {}

void EgMetaPolicy::save_state(const std::string& dir) const {
  write_json_file(dir + "/meta_eg.json", json{{"q", q_}});
}

void EgMetaPolicy::load_state(const std::string& dir) {
  q_ = read_json_file(dir + "/meta_eg.json").at("q").get<std::vector<double>>();
}

void LtsMetaPolicy::save_state(const std::string& dir) const {
  write_json_file(dir + "/meta_lts.json", lts_core_to_json(core_));
}

void LtsMetaPolicy::load_state(const std::string& dir) {
  lts_core_from_json(core_, read_json_file(dir + "/meta_lts.json"));
}

void NltsMetaPolicy::save_state(const std::string& dir) const {
  write_json_file(dir + "/meta_nlts.json", lts_core_to_json(core_));
  extractor_.save(dir + "/meta_nlts_extractor.tdnn");
}

void NltsMetaPolicy::load_state(const std::string& dir) {
  lts_core_from_json(core_, read_json_file(dir + "/meta_nlts.json"));
  extractor_ = Mlp::load(dir + "/meta_nlts_extractor.tdnn");
}

void DdqlMetaPolicy::save_state(const std::string& dir) const {
  agent_.q_net().save(dir + "/meta_ddql.tdnn");
}

void DdqlMetaPolicy::load_state(const std::string& dir) {
  const Mlp net = Mlp::load(dir + "/meta_ddql.tdnn");
  agent_.set_nets(net, net);
}

std::unique_ptr<MetaPolicy> make_meta_policy(MetaAlgorithm algo,
                                             const SimConfig& cfg,
                                             std::int64_t total_meta_steps,
                                             std::uint64_t master_seed) {
  const int context_size = 4 * cfg.n_ues;
  auto init = make_rng(master_seed, RngStream::AgentInit, 900);
  auto explore = make_rng(master_seed, RngStream::Meta, 1);
  auto sampler = make_rng(master_seed, RngStream::Meta, 2);
  switch (algo) {
    case MetaAlgorithm::R:
      return std::make_unique<RandomMetaPolicy>(std::move(explore));
    case MetaAlgorithm::EG:
      return std::make_unique<EgMetaPolicy>(cfg.eg_epsilon, cfg.eg_alpha,
                                            std::move(explore));
    case MetaAlgorithm::LTS:
      return std::make_unique<LtsMetaPolicy>(context_size, cfg,
                                             std::move(explore));
    case MetaAlgorithm::NLTS:
      return std::make_unique<NltsMetaPolicy>(context_size, cfg,
                                              std::move(init),
                                              std::move(explore));
    case MetaAlgorithm::DDQL:
      return std::make_unique<DdqlMetaPolicy>(
          context_size, cfg, total_meta_steps, std::move(init),
          std::move(explore), std::move(sampler));
    case MetaAlgorithm::None:
      break;
  }
  throw std::invalid_argument("make_meta_policy: no algorithm selected");
}

}  // namespace tdsim
