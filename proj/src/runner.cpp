#include "tdsim/runner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace tdsim {

namespace fs = std::filesystem;
using nlohmann::json;

double quantile_linear(const std::vector<double>& sorted, double p) {
  assert(!sorted.empty());
  if (sorted.size() == 1) return sorted[0];
  const double pos = p * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

BoxplotSummary summarize(std::vector<double> values) {
  BoxplotSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_linear(values, 0.25);
  s.median = quantile_linear(values, 0.5);
  s.q3 = quantile_linear(values, 0.75);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();

  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_lo = s.max;
  s.whisker_hi = s.min;
  for (double v : values) {
    if (v >= lo_fence) {
      s.whisker_lo = v;  // first datum inside the lower fence (sorted order)
      break;
    }
  }
  for (auto it = values.rbegin(); it != values.rend(); ++it) {
    if (*it <= hi_fence) {
      s.whisker_hi = *it;
      break;
    }
  }
  for (double v : values)
    if (v < s.whisker_lo || v > s.whisker_hi) s.n_outliers += 1;
  return s;
}

Experiment::Experiment(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const std::int64_t per_ue_steps =
      static_cast<std::int64_t>(cfg_.episodes) * cfg_.steps_per_episode;

  if (centralized_ca_enabled()) {
    ca_central_.emplace(kCaStateSize, cfg_.ca_hidden, 3, cfg_,
                        per_ue_steps * cfg_.n_ues,
                        make_rng(cfg_.seed, RngStream::AgentInit, 0),
                        make_rng(cfg_.seed, RngStream::Exploration, 100),
                        make_rng(cfg_.seed, RngStream::Sampler, 200));
  }
  if (federated_ca_enabled()) {
    ca_federated_.reserve(cfg_.n_ues);
    for (int u = 0; u < cfg_.n_ues; ++u) {
      ca_federated_.emplace_back(
          kCaStateSize, cfg_.ca_hidden, 3, cfg_, per_ue_steps,
          make_rng(cfg_.seed, RngStream::AgentInit, 1 + u),
          make_rng(cfg_.seed, RngStream::Exploration, 101 + u),
          make_rng(cfg_.seed, RngStream::Sampler, 201 + u));
    }
  }
  if (sa_enabled()) {
    auto init = make_rng(cfg_.seed, RngStream::AgentInit, 50);
    sa_.emplace(kSaObsSize, cfg_.sa_hidden, cfg_.priority_levels, cfg_,
                std::move(init), make_rng(cfg_.seed, RngStream::Sampler, 250));
  }
  sa_act_rng_ = make_rng(cfg_.seed, RngStream::Exploration, 150);

  if (cfg_.mode == Mode::META) {
    const std::int64_t total_meta_steps =
        static_cast<std::int64_t>(cfg_.episodes) *
        std::max(1, cfg_.steps_per_episode / cfg_.window_w);
    meta_ = make_meta_policy(cfg_.meta_algorithm, cfg_, total_meta_steps,
                             cfg_.seed);
  }
}

bool Experiment::sa_enabled() const {
  return cfg_.mode == Mode::S || cfg_.mode == Mode::ICS ||
         cfg_.mode == Mode::CCS || cfg_.mode == Mode::META;
}

bool Experiment::centralized_ca_enabled() const {
  switch (cfg_.mode) {
    case Mode::C: return cfg_.learning == Learning::Centralized;
    case Mode::ICS:
    case Mode::CCS:
    case Mode::META: return true;
    case Mode::S: return false;
  }
  return false;
}

bool Experiment::federated_ca_enabled() const {
  if (cfg_.mode == Mode::C) return cfg_.learning == Learning::Federated;
  return cfg_.mode == Mode::META;
}

bool Experiment::ca_decisions_centralized() const {
  if (cfg_.mode == Mode::META)
    return meta_mode_ == LearnedMode::CentralizedIcs;
  return cfg_.learning == Learning::Centralized;
}

void Experiment::make_decision(int ue, Engine& engine, bool training,
                               EpisodeMetrics& m) {
  const UeSnapshot snap = engine.snapshot(ue);
  const bool need_cent = centralized_ca_enabled();
  const bool need_dec = federated_ca_enabled();
  Eigen::VectorXd cent_state, dec_state;
  if (need_cent) cent_state = build_centralized_state(snap, cfg_);
  if (need_dec) dec_state = build_decentralized_state(snap, cfg_);

  // Compression choice by the active branch; S mode pins it per arm.
  int ca_action;
  if (cfg_.mode == Mode::S) {
    ca_action =
        static_cast<int>(compression_config(cfg_.fixed_compression).label);
  } else if (ca_decisions_centralized()) {
    ca_action = ca_central_->select_action(cent_state, training);
  } else {
    ca_action = ca_federated_[ue].select_action(dec_state, training);
  }
  m.ca_action_counts[ca_action] += 1;

  // Priority choice while the scheduling agent drives allocation.
  const bool sa_drives =
      sa_enabled() && (cfg_.mode != Mode::META ||
                       meta_mode_ == LearnedMode::CentralizedIcs);
  PendingStep step;
  step.centralized_branch = ca_decisions_centralized();
  step.ca_action = ca_action;
  if (need_cent) step.cent_state = cent_state;
  if (need_dec) step.dec_state = dec_state;

  int priority = 1;
  if (sa_drives) {
    const Eigen::VectorXd obs = build_sa_observation(snap, cfg_);
    const auto sample = sa_->act(obs, sa_act_rng_, training);
    priority = sample.action + 1;  // actions are priority levels 1..K
    step.sa_active = true;
    step.sa_obs = obs;
    step.sa_action = sample.action;
    step.sa_logp = sample.log_prob;
    step.sa_value = sample.value;
  }
  current_priority_[ue] = priority;

  const Frame& f =
      engine.push_frame(ue, compression_table()[ca_action], priority);

  // The previous decision's next-state view is the state built now.
  if (f.seq > 0) {
    auto it = pending_[ue].find(f.seq - 1);
    if (it != pending_[ue].end()) {
      if (need_cent) it->second.cent_next = cent_state;
      if (need_dec) it->second.dec_next = dec_state;
      if (it->second.sa_active) it->second.sa_next_obs = step.sa_obs;
      it->second.has_next = true;
      try_complete(ue, f.seq - 1, training);
    }
  }
  pending_[ue].emplace(f.seq, std::move(step));
}

void Experiment::handle_delivery(const DeliveryRecord& rec, Engine& engine,
                                 bool training, EpisodeMetrics& m,
                                 std::vector<double>& latencies) {
  const int ue = rec.ue_id;
  latencies.push_back(rec.e2e_latency_ms);
  m.map_mean += rec.map_value;
  if (rec.deadline_met) m.deadline_hit_prob += 1.0;
  m.deliveries += 1;

  // Reward semantics: CCS couples the agents, every other mode uses the
  // independent forms.
  const Mode reward_mode = cfg_.mode == Mode::CCS ? Mode::CCS : Mode::ICS;
  const double r_ca = reward_ca(rec.e2e_latency_ms, cfg_.latency_threshold_ms,
                                rec.map_value, reward_mode, rec.priority);
  ca_reward_acc_.push_back(r_ca);

  auto it = pending_[ue].find(rec.seq);
  if (it != pending_[ue].end()) {
    it->second.ca_reward = r_ca;
    if (it->second.sa_active) {
      it->second.sa_reward =
          reward_sa(rec.e2e_latency_ms, cfg_.latency_threshold_ms,
                    rec.map_value, rec.priority, reward_mode);
      sa_reward_acc_.push_back(it->second.sa_reward);
    }
    it->second.has_reward = true;
    try_complete(ue, rec.seq, training);
  }

  if (cfg_.mode == Mode::META) {
    auto& acc = meta_acc_[ue];
    auto push_capped = [&](std::deque<double>& dq, double v) {
      dq.push_back(v);
      if (static_cast<int>(dq.size()) > cfg_.window_w) dq.pop_front();
    };
    push_capped(acc.sinr, engine.channel(ue).state().sinr_db);
    push_capped(acc.reward, r_ca);
    push_capped(acc.latency, rec.e2e_latency_ms);
    push_capped(acc.map, rec.map_value);
    acc.count += 1;

    bool window_full = true;
    for (const auto& a : meta_acc_)
      if (a.count < cfg_.window_w) window_full = false;
    if (window_full) close_meta_window(training, m);
  }
}

void Experiment::try_complete(int ue, std::uint64_t seq, bool training) {
  auto it = pending_[ue].find(seq);
  if (it == pending_[ue].end()) return;
  PendingStep& p = it->second;
  if (!p.has_reward || !p.has_next) return;

  if (!training) {
    pending_[ue].erase(it);
    return;
  }

  const bool concurrent =
      cfg_.mode == Mode::META && cfg_.meta_concurrent_training;

  if (ca_central_ &&
      (concurrent || (centralized_ca_enabled() && p.centralized_branch))) {
    ca_central_->observe({p.cent_state, p.ca_action, p.ca_reward, p.cent_next,
                          false});
    ca_central_->update();
  }
  if (!ca_federated_.empty() &&
      (concurrent || (federated_ca_enabled() && !p.centralized_branch))) {
    ca_federated_[ue].observe({p.dec_state, p.ca_action, p.ca_reward,
                               p.dec_next, false});
    ca_federated_[ue].update();
  }

  if (p.sa_active && sa_) {
    PpoStep step;
    step.obs = p.sa_obs;
    step.action = p.sa_action;
    step.log_prob = p.sa_logp;
    step.reward = p.sa_reward;
    step.value = p.sa_value;
    step.next_value = sa_->value(p.sa_next_obs);
    sa_->push_step(ue, std::move(step));
    if (sa_->ready()) {
      const PpoDiag diag = sa_->update();
      if (on_sa_update) on_sa_update(sa_->updates(), diag);
    }
  }

  pending_[ue].erase(it);
}

void Experiment::close_meta_window(bool training,
                                   EpisodeMetrics& m) {
  std::vector<MetaWindowUe> window(cfg_.n_ues);
  std::vector<double> window_rewards;
  double network_sinr = 0.0;
  for (int u = 0; u < cfg_.n_ues; ++u) {
    const auto& acc = meta_acc_[u];
    auto mean_of = [](const std::deque<double>& dq) {
      double s = 0.0;
      for (double v : dq) s += v;
      return dq.empty() ? 0.0 : s / dq.size();
    };
    window[u].mean_sinr_db = mean_of(acc.sinr);
    window[u].mean_ca_reward = mean_of(acc.reward);
    window[u].mean_latency_ms = mean_of(acc.latency);
    window[u].mean_map = mean_of(acc.map);
    network_sinr += window[u].mean_sinr_db;
    for (double r : acc.reward) window_rewards.push_back(r);
  }
  network_sinr /= cfg_.n_ues;

  const Eigen::VectorXd context = build_meta_context(window, cfg_);
  const double reward = meta_reward(window_rewards);
  meta_reward_acc_.push_back(reward);

  if (training && meta_has_prev_)
    meta_->learn(meta_prev_context_, meta_prev_action_, reward, context);

  const int action = meta_->select(context, training);
  m.meta_action_counts[action] += 1;
  const MetaDecision decision =
      apply_threshold(kMetaThresholdsDb[action], network_sinr);
  meta_mode_ = decision.resulting_mode;

  total_windows_ += 1;
  if (meta_mode_ == LearnedMode::CentralizedIcs) centralized_windows_ += 1;
  meta_window_index_ += 1;
  if (on_meta_decision) {
    on_meta_decision({meta_window_index_, decision.gamma_db, network_sinr,
                      meta_mode_ == LearnedMode::CentralizedIcs, reward});
  }

  meta_has_prev_ = true;
  meta_prev_context_ = context;
  meta_prev_action_ = action;
  for (auto& acc : meta_acc_) acc.count = 0;
}

EpisodeMetrics Experiment::run_episode(bool training) {
  Engine engine(cfg_, cfg_.seed, static_cast<std::uint64_t>(episode_counter_));
  if (on_slot_trace) engine.set_trace_sink(on_slot_trace);

  pending_.assign(cfg_.n_ues, {});
  current_priority_.assign(cfg_.n_ues, 1);
  meta_acc_.assign(cfg_.n_ues, {});
  ca_reward_acc_.clear();
  sa_reward_acc_.clear();
  meta_reward_acc_.clear();
  centralized_windows_ = 0;
  total_windows_ = 0;
  meta_has_prev_ = false;  // windows do not span the simulation restart

  EpisodeMetrics m;
  m.episode = static_cast<int>(episode_counter_);
  std::vector<double> latencies;
  latencies.reserve(static_cast<std::size_t>(cfg_.n_ues) *
                    cfg_.steps_per_episode);

  std::vector<int> priorities(cfg_.n_ues, 1);
  std::vector<std::int64_t> demands(cfg_.n_ues, 0);

  // Generous guard against a configuration that cannot deliver.
  const std::int64_t max_slots = static_cast<std::int64_t>(
      100.0 * cfg_.steps_per_episode * cfg_.frame_period_ms() /
      cfg_.slot_ms());

  while (true) {
    engine.begin_slot();
    for (int u = 0; u < cfg_.n_ues; ++u)
      while (engine.generation_due(u)) make_decision(u, engine, training, m);

    for (int u = 0; u < cfg_.n_ues; ++u) {
      demands[u] = engine.demand_symbols(u);
      priorities[u] = current_priority_[u];
    }
    const bool sa_allocates =
        sa_enabled() && (cfg_.mode != Mode::META ||
                         meta_mode_ == LearnedMode::CentralizedIcs);
    const std::vector<int> alloc =
        sa_allocates
            ? greedy_allocate(priorities, demands, cfg_.useful_symbols_per_slot,
                              static_cast<int>(rotation_offset_))
            : equal_share_allocate(demands, cfg_.useful_symbols_per_slot,
                                   static_cast<int>(rotation_offset_));
    rotation_offset_ += 1;

    for (const DeliveryRecord& rec : engine.advance_slot(alloc))
      handle_delivery(rec, engine, training, m, latencies);

    std::uint64_t min_deliveries = engine.frames_delivered(0);
    for (int u = 1; u < cfg_.n_ues; ++u)
      min_deliveries = std::min(min_deliveries, engine.frames_delivered(u));
    if (min_deliveries >= static_cast<std::uint64_t>(cfg_.steps_per_episode))
      break;
    if (static_cast<std::int64_t>(engine.slot_index()) >= max_slots) break;
  }

  // Federation round at the episode boundary.
  if (training && !ca_federated_.empty() &&
      (episode_counter_ + 1) % cfg_.federation_period_episodes == 0)
    fedavg_round(ca_federated_);

  auto mean_or_nan = [](const std::vector<double>& v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
  };
  m.ca_reward_mean = mean_or_nan(ca_reward_acc_);
  m.sa_reward_mean = mean_or_nan(sa_reward_acc_);
  m.meta_reward_mean = mean_or_nan(meta_reward_acc_);
  if (m.deliveries > 0) {
    m.map_mean /= m.deliveries;
    m.deadline_hit_prob /= m.deliveries;
  }
  m.latency = summarize(latencies);
  if (!latencies.empty()) {
    double var = 0.0;
    for (double v : latencies)
      var += (v - m.latency.mean) * (v - m.latency.mean);
    m.latency_std = std::sqrt(var / latencies.size());
  }
  if (cfg_.mode == Mode::META) {
    m.frac_centralized =
        total_windows_ > 0
            ? static_cast<double>(centralized_windows_) / total_windows_
            : 1.0;
  } else {
    m.frac_centralized = cfg_.learning == Learning::Centralized ? 1.0 : 0.0;
  }

  episode_counter_ += 1;
  return m;
}

std::vector<EpisodeMetrics> Experiment::train(int episodes) {
  std::vector<EpisodeMetrics> out;
  out.reserve(episodes);
  for (int e = 0; e < episodes; ++e) out.push_back(run_episode(true));
  return out;
}

void Experiment::save_checkpoints(const std::string& dir) const {
  fs::create_directories(dir);
  if (ca_central_) ca_central_->q_net().save(dir + "/ca_central.tdnn");
  for (std::size_t u = 0; u < ca_federated_.size(); ++u)
    ca_federated_[u].q_net().save(dir + "/ca_ue" + std::to_string(u) +
                                  ".tdnn");
  if (sa_) {
    sa_->actor().save(dir + "/sa_actor.tdnn");
    sa_->critic().save(dir + "/sa_critic.tdnn");
  }
  if (meta_) meta_->save_state(dir);
}

void Experiment::load_checkpoints(const std::string& dir) {
  if (ca_central_) {
    const Mlp net = Mlp::load(dir + "/ca_central.tdnn");
    ca_central_->set_nets(net, net);
  }
  for (std::size_t u = 0; u < ca_federated_.size(); ++u) {
    const Mlp net = Mlp::load(dir + "/ca_ue" + std::to_string(u) + ".tdnn");
    ca_federated_[u].set_nets(net, net);
  }
  if (sa_) {
    sa_->actor() = Mlp::load(dir + "/sa_actor.tdnn");
    sa_->critic() = Mlp::load(dir + "/sa_critic.tdnn");
  }
  if (meta_) meta_->load_state(dir);
}

double tail_mean(const std::vector<EpisodeMetrics>& eps, int tail,
                 double EpisodeMetrics::* field) {
  if (eps.empty()) return std::nan("");
  const int n = static_cast<int>(eps.size());
  const int start = std::max(0, n - tail);
  double s = 0.0;
  for (int i = start; i < n; ++i) s += eps[i].*field;
  return s / (n - start);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "episode,ca_reward_mean,sa_reward_mean,meta_reward_mean,"
         "latency_mean,latency_std,latency_min,latency_q1,latency_median,"
         "latency_q3,latency_max,latency_whisker_lo,latency_whisker_hi,"
         "latency_outliers,map_mean,deadline_hit_prob,frac_centralized,"
         "deliveries,ca_c1,ca_c2,ca_c3,meta_g10,meta_g20,meta_g30";
}

std::string metrics_csv_row(const EpisodeMetrics& m) {
  std::string row = std::to_string(m.episode);
  for (double v : {m.ca_reward_mean, m.sa_reward_mean, m.meta_reward_mean,
                   m.latency.mean, m.latency_std, m.latency.min, m.latency.q1,
                   m.latency.median, m.latency.q3, m.latency.max,
                   m.latency.whisker_lo, m.latency.whisker_hi})
    row += "," + fmt(v);
  row += "," + std::to_string(m.latency.n_outliers);
  row += "," + fmt(m.map_mean);
  row += "," + fmt(m.deadline_hit_prob);
  row += "," + fmt(m.frac_centralized);
  row += "," + std::to_string(m.deliveries);
  for (auto c : m.ca_action_counts) row += "," + std::to_string(c);
  for (auto c : m.meta_action_counts) row += "," + std::to_string(c);
  return row;
}

void write_summary_json(const std::string& path,
                        const std::vector<EpisodeMetrics>& eps, int tail) {
  json j;
  j["episodes"] = eps.size();
  j["tail_episodes"] = std::min<int>(tail, static_cast<int>(eps.size()));
  auto put = [&](const char* name, double EpisodeMetrics::* field) {
    const double v = tail_mean(eps, tail, field);
    if (std::isnan(v))
      j["tail_mean"][name] = nullptr;
    else
      j["tail_mean"][name] = v;
  };
  put("ca_reward_mean", &EpisodeMetrics::ca_reward_mean);
  put("sa_reward_mean", &EpisodeMetrics::sa_reward_mean);
  put("meta_reward_mean", &EpisodeMetrics::meta_reward_mean);
  put("map_mean", &EpisodeMetrics::map_mean);
  put("deadline_hit_prob", &EpisodeMetrics::deadline_hit_prob);
  put("frac_centralized", &EpisodeMetrics::frac_centralized);
  put("latency_std", &EpisodeMetrics::latency_std);

  const int n = static_cast<int>(eps.size());
  const int start = std::max(0, n - tail);
  double lat = 0.0, med = 0.0;
  for (int i = start; i < n; ++i) {
    lat += eps[i].latency.mean;
    med += eps[i].latency.median;
  }
  if (n > start) {
    j["tail_mean"]["latency_mean"] = lat / (n - start);
    j["tail_mean"]["latency_median"] = med / (n - start);
  }

  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for write");
  out << j.dump(2) << "\n";
}

CampaignResult run_campaign(const SimConfig& cfg, const std::string& out_dir) {
  CampaignResult result;
  result.out_dir = out_dir;

  std::ofstream metrics_file, sa_file, meta_file, trace_file;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream cfg_out(out_dir + "/config.json");
    if (!cfg_out)
      throw std::runtime_error("cannot write config snapshot in '" + out_dir +
                               "'");
    cfg_out << cfg.to_json_string() << "\n";
    metrics_file.open(out_dir + "/metrics.csv");
    metrics_file << metrics_csv_header() << "\n";
  }

  Experiment experiment(cfg);
  if (!out_dir.empty()) {
    if (cfg.mode == Mode::META) {
      meta_file.open(out_dir + "/meta_decisions.csv");
      meta_file << "window,gamma_db,mean_sinr_db,centralized,reward\n";
      experiment.on_meta_decision = [&](const MetaDecisionRow& r) {
        meta_file << r.window << "," << fmt(r.gamma_db) << ","
                  << fmt(r.mean_sinr_db) << "," << (r.centralized ? 1 : 0)
                  << "," << fmt(r.reward) << "\n";
      };
    }
    if (cfg.mode != Mode::C) {
      sa_file.open(out_dir + "/sa_updates.csv");
      sa_file << "update,policy_loss,value_loss,entropy\n";
      experiment.on_sa_update = [&](std::int64_t n, const PpoDiag& d) {
        sa_file << n << "," << fmt(d.policy_loss) << "," << fmt(d.value_loss)
                << "," << fmt(d.entropy) << "\n";
      };
    }
    if (cfg.trace) {
      trace_file.open(out_dir + "/trace.jsonl");
      experiment.on_slot_trace = [&](const SlotTrace& t) {
        json j;
        j["slot"] = t.slot;
        j["now_ms"] = t.now_ms;
        json ues = json::array();
        for (const auto& u : t.ues)
          ues.push_back({{"state", std::string(1, u.chain_state)},
                         {"sinr_db", u.sinr_db},
                         {"mcs", u.mcs},
                         {"outage", u.outage},
                         {"alloc", u.allocated},
                         {"drained_bits", u.drained_bits},
                         {"occupancy_bits", u.occupancy_bits}});
        j["ues"] = ues;
        trace_file << j.dump() << "\n";
      };
    }
  }

  for (int e = 0; e < cfg.episodes; ++e) {
    result.episodes.push_back(experiment.run_episode(true));
    if (metrics_file.is_open())
      metrics_file << metrics_csv_row(result.episodes.back()) << "\n";
  }

  if (!out_dir.empty()) {
    experiment.save_checkpoints(out_dir + "/checkpoints");
    write_summary_json(out_dir + "/summary.json", result.episodes,
                       cfg.summary_tail_episodes);
  }
  return result;
}

CampaignResult run_eval(const std::string& checkpoint_dir, int episodes) {
  const SimConfig cfg = load_config_file(checkpoint_dir + "/config.json");
  Experiment experiment(cfg);
  experiment.load_checkpoints(checkpoint_dir + "/checkpoints");

  CampaignResult result;
  result.out_dir = checkpoint_dir;
  for (int e = 0; e < episodes; ++e)
    result.episodes.push_back(experiment.run_episode(false));

  std::ofstream metrics_file(checkpoint_dir + "/eval_metrics.csv");
  if (metrics_file) {
    metrics_file << metrics_csv_header() << "\n";
    for (const auto& m : result.episodes)
      metrics_file << metrics_csv_row(m) << "\n";
  }
  write_summary_json(checkpoint_dir + "/eval_summary.json", result.episodes,
                     episodes);
  return result;
}

}  // namespace tdsim
