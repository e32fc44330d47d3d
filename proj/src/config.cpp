#include "tdsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tdsim {

using nlohmann::json;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::C: return "C";
    case Mode::S: return "S";
    case Mode::ICS: return "ICS";
    case Mode::CCS: return "CCS";
    case Mode::META: return "META";
  }
  return "?";
}

std::string to_string(Learning l) {
  return l == Learning::Centralized ? "CENTRALIZED" : "FEDERATED";
}

std::string to_string(MetaAlgorithm a) {
  switch (a) {
    case MetaAlgorithm::None: return "";
    case MetaAlgorithm::R: return "R";
    case MetaAlgorithm::EG: return "EG";
    case MetaAlgorithm::LTS: return "LTS";
    case MetaAlgorithm::NLTS: return "NLTS";
    case MetaAlgorithm::DDQL: return "DDQL";
  }
  return "?";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::StaticG: return "STATIC_G";
    case Regime::StaticB: return "STATIC_B";
    case Regime::Dc16: return "DC_1_6";
    case Regime::Dc12: return "DC_1_2";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "C") return Mode::C;
  if (s == "S") return Mode::S;
  if (s == "ICS") return Mode::ICS;
  if (s == "CCS") return Mode::CCS;
  if (s == "META") return Mode::META;
  throw ValidationError("mode: unknown value '" + s + "'");
}

Learning learning_from_string(const std::string& s) {
  if (s == "CENTRALIZED" || s == "centralized") return Learning::Centralized;
  if (s == "FEDERATED" || s == "federated") return Learning::Federated;
  throw ValidationError("learning: unknown value '" + s + "'");
}

MetaAlgorithm meta_algorithm_from_string(const std::string& s) {
  if (s.empty()) return MetaAlgorithm::None;
  if (s == "R") return MetaAlgorithm::R;
  if (s == "EG") return MetaAlgorithm::EG;
  if (s == "LTS") return MetaAlgorithm::LTS;
  if (s == "NLTS") return MetaAlgorithm::NLTS;
  if (s == "DDQL") return MetaAlgorithm::DDQL;
  throw ValidationError("meta_algorithm: unknown value '" + s + "'");
}

Regime regime_from_string(const std::string& s) {
  if (s == "STATIC_G") return Regime::StaticG;
  if (s == "STATIC_B") return Regime::StaticB;
  if (s == "DC_1_6") return Regime::Dc16;
  if (s == "DC_1_2") return Regime::Dc12;
  throw ValidationError("regime: unknown value '" + s + "'");
}

std::pair<double, double> channel_regime(Regime r) {
  switch (r) {
    case Regime::StaticG: return {0.0, 1.0};
    case Regime::StaticB: return {1.0, 0.0};
    case Regime::Dc16: return {0.2, 1.0};
    case Regime::Dc12: return {1.0, 1.0};
  }
  return {0.0, 1.0};
}

std::pair<double, double> channel_regime(const std::string& name) {
  return channel_regime(regime_from_string(name));
}

McsTable McsTable::nr_default() {
  // 38.214 256-QAM efficiency ladder extended to 29 entries so the index
  // range is [0, 28]; cutoffs follow the fixed -6 + i dB placement.
  McsTable t;
  t.efficiencies = {
      0.2344, 0.3066, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.6953,
      1.9141, 2.1602, 2.4063, 2.5703, 2.7305, 3.0293, 3.3223, 3.6094,
      3.9023, 4.2129, 4.5234, 4.8164, 5.1152, 5.3320, 5.5547, 5.8906,
      6.2266, 6.5703, 6.9141, 7.1602, 7.4063};
  t.thresholds_db.resize(29);
  for (int i = 0; i < 29; ++i) t.thresholds_db[i] = -6.0 + i;
  return t;
}

void McsTable::validate() const {
  if (thresholds_db.size() != 29 || efficiencies.size() != 29)
    throw ValidationError("mcs_table: expected 29 entries");
  for (std::size_t i = 1; i < 29; ++i) {
    if (thresholds_db[i] <= thresholds_db[i - 1])
      throw ValidationError("mcs_table: thresholds not strictly increasing");
    if (efficiencies[i] <= efficiencies[i - 1])
      throw ValidationError("mcs_table: efficiencies not strictly increasing");
  }
  if (efficiencies.front() <= 0.0)
    throw ValidationError("mcs_table: efficiencies must be positive");
}

namespace {

void check_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ValidationError(std::string(name) + ": probability out of [0,1]");
}

void check_pos(double v, const char* name) {
  if (!(v > 0.0))
    throw ValidationError(std::string(name) + ": must be strictly positive");
}

void check_pos_int(int v, const char* name) {
  if (v <= 0)
    throw ValidationError(std::string(name) + ": must be a positive integer");
}

}  // namespace

void SimConfig::validate() const {
  check_pos_int(n_ues, "n_ues");
  check_pos(carrier_ghz, "carrier_ghz");
  check_pos(bandwidth_mhz, "bandwidth_mhz");
  if (numerology < 0) throw ValidationError("numerology: must be nonnegative");
  check_pos(symbol_duration_us, "symbol_duration_us");
  check_pos_int(useful_symbols_per_slot, "useful_symbols_per_slot");
  check_pos_int(n_prb, "n_prb");
  check_pos(lidar_fps, "lidar_fps");
  if (latency_threshold_ms != 30.0 && latency_threshold_ms != 50.0)
    throw ValidationError("latency_threshold_ms: must be 30 or 50");
  check_pos_int(priority_levels, "priority_levels");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("gamma: must lie in (0,1)");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0))
    throw ValidationError("gae_lambda: must lie in (0,1]");
  check_pos(learning_rate, "learning_rate");
  if (!(ppo_clip > 0.0 && ppo_clip < 1.0))
    throw ValidationError("ppo_clip: must lie in (0,1)");
  if (ppo_c1 < 0.0) throw ValidationError("ppo_c1: must be nonnegative");
  if (ppo_c2 < 0.0) throw ValidationError("ppo_c2: must be nonnegative");
  check_pos_int(ppo_epochs, "ppo_epochs");
  check_pos_int(minibatch, "minibatch");
  check_pos_int(window_w, "window_w");
  check_pos_int(t_ddql, "t_ddql");
  check_pos_int(t_ppo, "t_ppo");
  check_pos_int(t_nlts, "t_nlts");
  check_pos(lts_rm, "lts_rm");
  check_pos(lts_rho, "lts_rho");
  check_pos_int(episodes, "episodes");
  check_pos_int(steps_per_episode, "steps_per_episode");
  check_pos(backhaul_delay_ms, "backhaul_delay_ms");
  check_pos(backhaul_rate_gbps, "backhaul_rate_gbps");
  check_prob(p_gb, "p_gb");
  check_prob(p_bg, "p_bg");
  if (sinr_spread_db < 0.0)
    throw ValidationError("sinr_spread_db: must be nonnegative");
  check_pos(sinr_truncation_db, "sinr_truncation_db");
  check_prob(outage_prob_g, "outage_prob_g");
  check_prob(outage_prob_b, "outage_prob_b");
  mcs_table.validate();
  if (fixed_compression != "C1" && fixed_compression != "C2" &&
      fixed_compression != "C3")
    throw ValidationError("fixed_compression: must be C1, C2 or C3");
  check_pos_int(replay_capacity, "replay_capacity");
  check_prob(epsilon_start, "epsilon_start");
  check_prob(epsilon_min, "epsilon_min");
  if (epsilon_min > epsilon_start)
    throw ValidationError("epsilon_min: must not exceed epsilon_start");
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0))
    throw ValidationError("epsilon_decay_fraction: must lie in (0,1]");
  check_prob(eg_epsilon, "eg_epsilon");
  if (!(eg_alpha > 0.0 && eg_alpha <= 1.0))
    throw ValidationError("eg_alpha: must lie in (0,1]");
  check_pos_int(layer_stats_window, "layer_stats_window");
  for (const char* name : {"ca_hidden", "sa_hidden", "meta_hidden"}) {
    const auto& v = std::string(name) == "ca_hidden"   ? ca_hidden
                    : std::string(name) == "sa_hidden" ? sa_hidden
                                                       : meta_hidden;
    if (v.empty()) throw ValidationError(std::string(name) + ": empty");
    for (int h : v) check_pos_int(h, name);
  }
  check_pos_int(federation_period_episodes, "federation_period_episodes");
  check_pos_int(nlts_retrain_epochs, "nlts_retrain_epochs");
  check_pos_int(nlts_history_capacity, "nlts_history_capacity");
  check_pos_int(summary_tail_episodes, "summary_tail_episodes");
  if (!(norm_sinr_max_db > norm_sinr_min_db))
    throw ValidationError("norm_sinr_max_db: must exceed norm_sinr_min_db");
  check_pos(norm_latency_max_ms, "norm_latency_max_ms");
  check_pos(norm_occupancy_frames, "norm_occupancy_frames");
  check_pos(norm_symbols_max, "norm_symbols_max");
  if (norm_reward_min >= 0.0)
    throw ValidationError("norm_reward_min: must be negative");

  if (mode == Mode::META && meta_algorithm == MetaAlgorithm::None)
    throw ValidationError("meta_algorithm: required when mode is META");
  if ((mode == Mode::S || mode == Mode::ICS || mode == Mode::CCS) &&
      learning != Learning::Centralized)
    throw ValidationError(
        "learning: the scheduling agent is centralized-only; mode " +
        to_string(mode) + " requires CENTRALIZED");
}

namespace {

json table_to_json(const McsTable& t) {
  json arr = json::array();
  for (std::size_t i = 0; i < t.thresholds_db.size(); ++i)
    arr.push_back({{"threshold_db", t.thresholds_db[i]},
                   {"efficiency", t.efficiencies[i]}});
  return arr;
}

McsTable table_from_json(const json& arr) {
  if (!arr.is_array()) throw ValidationError("mcs_table: expected an array");
  McsTable t;
  for (const auto& e : arr) {
    for (const auto& [k, v] : e.items()) {
      if (k != "threshold_db" && k != "efficiency")
        throw ValidationError("mcs_table: unknown key '" + k + "'");
      (void)v;
    }
    t.thresholds_db.push_back(e.at("threshold_db").get<double>());
    t.efficiencies.push_back(e.at("efficiency").get<double>());
  }
  return t;
}

json config_to_json(const SimConfig& c) {
  json j;
  j["n_ues"] = c.n_ues;
  j["carrier_ghz"] = c.carrier_ghz;
  j["bandwidth_mhz"] = c.bandwidth_mhz;
  j["numerology"] = c.numerology;
  j["symbol_duration_us"] = c.symbol_duration_us;
  j["useful_symbols_per_slot"] = c.useful_symbols_per_slot;
  j["n_prb"] = c.n_prb;
  j["lidar_fps"] = c.lidar_fps;
  j["latency_threshold_ms"] = c.latency_threshold_ms;
  j["priority_levels"] = c.priority_levels;
  j["gamma"] = c.gamma;
  j["gae_lambda"] = c.gae_lambda;
  j["learning_rate"] = c.learning_rate;
  j["ppo_clip"] = c.ppo_clip;
  j["ppo_c1"] = c.ppo_c1;
  j["ppo_c2"] = c.ppo_c2;
  j["ppo_epochs"] = c.ppo_epochs;
  j["minibatch"] = c.minibatch;
  j["window_w"] = c.window_w;
  j["t_ddql"] = c.t_ddql;
  j["t_ppo"] = c.t_ppo;
  j["t_nlts"] = c.t_nlts;
  j["lts_rm"] = c.lts_rm;
  j["lts_rho"] = c.lts_rho;
  j["episodes"] = c.episodes;
  j["steps_per_episode"] = c.steps_per_episode;
  j["backhaul_delay_ms"] = c.backhaul_delay_ms;
  j["backhaul_rate_gbps"] = c.backhaul_rate_gbps;
  j["regime"] = to_string(c.regime);
  j["p_gb"] = c.p_gb;
  j["p_bg"] = c.p_bg;
  j["sinr_mean_g_db"] = c.sinr_mean_g_db;
  j["sinr_mean_b_db"] = c.sinr_mean_b_db;
  j["sinr_spread_db"] = c.sinr_spread_db;
  j["sinr_truncation_db"] = c.sinr_truncation_db;
  j["outage_prob_g"] = c.outage_prob_g;
  j["outage_prob_b"] = c.outage_prob_b;
  j["mcs_table"] = table_to_json(c.mcs_table);
  j["mode"] = to_string(c.mode);
  j["learning"] = to_string(c.learning);
  j["meta_algorithm"] = to_string(c.meta_algorithm);
  j["fixed_compression"] = c.fixed_compression;
  j["seed"] = c.seed;
  j["replay_capacity"] = c.replay_capacity;
  j["epsilon_start"] = c.epsilon_start;
  j["epsilon_min"] = c.epsilon_min;
  j["epsilon_decay_fraction"] = c.epsilon_decay_fraction;
  j["eg_epsilon"] = c.eg_epsilon;
  j["eg_alpha"] = c.eg_alpha;
  j["layer_stats_window"] = c.layer_stats_window;
  j["advantage_normalization"] = c.advantage_normalization;
  j["ca_hidden"] = c.ca_hidden;
  j["sa_hidden"] = c.sa_hidden;
  j["meta_hidden"] = c.meta_hidden;
  j["federation_period_episodes"] = c.federation_period_episodes;
  j["meta_concurrent_training"] = c.meta_concurrent_training;
  j["nlts_retrain_epochs"] = c.nlts_retrain_epochs;
  j["nlts_history_capacity"] = c.nlts_history_capacity;
  j["summary_tail_episodes"] = c.summary_tail_episodes;
  j["norm_sinr_min_db"] = c.norm_sinr_min_db;
  j["norm_sinr_max_db"] = c.norm_sinr_max_db;
  j["norm_latency_max_ms"] = c.norm_latency_max_ms;
  j["norm_occupancy_frames"] = c.norm_occupancy_frames;
  j["norm_symbols_max"] = c.norm_symbols_max;
  j["norm_reward_min"] = c.norm_reward_min;
  j["trace"] = c.trace;
  return j;
}

}  // namespace

std::string SimConfig::to_json_string() const {
  return config_to_json(*this).dump(2);
}

SimConfig load_config(const std::string& json_text) {
  json j;
  try {
    j = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");

  SimConfig c;

  static const std::set<std::string> known = {
      "n_ues", "carrier_ghz", "bandwidth_mhz", "numerology",
      "symbol_duration_us", "useful_symbols_per_slot", "n_prb", "lidar_fps",
      "latency_threshold_ms", "priority_levels", "gamma", "gae_lambda",
      "learning_rate", "ppo_clip", "ppo_c1", "ppo_c2", "ppo_epochs",
      "minibatch", "window_w", "t_ddql", "t_ppo", "t_nlts", "lts_rm",
      "lts_rho", "episodes", "steps_per_episode", "backhaul_delay_ms",
      "backhaul_rate_gbps", "regime", "p_gb", "p_bg", "sinr_mean_g_db",
      "sinr_mean_b_db", "sinr_spread_db", "sinr_truncation_db",
      "outage_prob_g", "outage_prob_b", "mcs_table", "mode", "learning",
      "meta_algorithm", "fixed_compression", "seed", "replay_capacity",
      "epsilon_start", "epsilon_min", "epsilon_decay_fraction", "eg_epsilon",
      "eg_alpha", "layer_stats_window", "advantage_normalization", "ca_hidden",
      "sa_hidden", "meta_hidden", "federation_period_episodes",
      "meta_concurrent_training", "nlts_retrain_epochs",
      "nlts_history_capacity", "summary_tail_episodes", "norm_sinr_min_db",
      "norm_sinr_max_db", "norm_latency_max_ms", "norm_occupancy_frames",
      "norm_symbols_max", "norm_reward_min", "trace"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key))
      throw ValidationError("config: unknown key '" + key + "'");
  }

  try {
    // Regime first so explicit p_gb/p_bg may override its mapping.
    if (j.contains("regime"))
      c.regime = regime_from_string(j["regime"].get<std::string>());
    std::tie(c.p_gb, c.p_bg) = channel_regime(c.regime);

    auto get = [&](const char* k, auto& field) {
      if (j.contains(k)) field = j[k].get<std::decay_t<decltype(field)>>();
    };
    get("n_ues", c.n_ues);
    get("carrier_ghz", c.carrier_ghz);
    get("bandwidth_mhz", c.bandwidth_mhz);
    get("numerology", c.numerology);
    get("symbol_duration_us", c.symbol_duration_us);
    get("useful_symbols_per_slot", c.useful_symbols_per_slot);
    get("n_prb", c.n_prb);
    get("lidar_fps", c.lidar_fps);
    get("latency_threshold_ms", c.latency_threshold_ms);
    get("priority_levels", c.priority_levels);
    get("gamma", c.gamma);
    get("gae_lambda", c.gae_lambda);
    get("learning_rate", c.learning_rate);
    get("ppo_clip", c.ppo_clip);
    get("ppo_c1", c.ppo_c1);
    get("ppo_c2", c.ppo_c2);
    get("ppo_epochs", c.ppo_epochs);
    get("minibatch", c.minibatch);
    get("window_w", c.window_w);
    get("t_ddql", c.t_ddql);
    get("t_ppo", c.t_ppo);
    get("t_nlts", c.t_nlts);
    get("lts_rm", c.lts_rm);
    get("lts_rho", c.lts_rho);
    get("episodes", c.episodes);
    get("steps_per_episode", c.steps_per_episode);
    get("backhaul_delay_ms", c.backhaul_delay_ms);
    get("backhaul_rate_gbps", c.backhaul_rate_gbps);
    get("p_gb", c.p_gb);
    get("p_bg", c.p_bg);
    get("sinr_mean_g_db", c.sinr_mean_g_db);
    get("sinr_mean_b_db", c.sinr_mean_b_db);
    get("sinr_spread_db", c.sinr_spread_db);
    get("sinr_truncation_db", c.sinr_truncation_db);
    get("outage_prob_g", c.outage_prob_g);
    get("outage_prob_b", c.outage_prob_b);
    if (j.contains("mcs_table")) c.mcs_table = table_from_json(j["mcs_table"]);
    if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
    if (j.contains("learning"))
      c.learning = learning_from_string(j["learning"].get<std::string>());
    if (j.contains("meta_algorithm"))
      c.meta_algorithm =
          meta_algorithm_from_string(j["meta_algorithm"].get<std::string>());
    get("fixed_compression", c.fixed_compression);
    get("seed", c.seed);
    get("replay_capacity", c.replay_capacity);
    get("epsilon_start", c.epsilon_start);
    get("epsilon_min", c.epsilon_min);
    get("epsilon_decay_fraction", c.epsilon_decay_fraction);
    get("eg_epsilon", c.eg_epsilon);
    get("eg_alpha", c.eg_alpha);
    get("layer_stats_window", c.layer_stats_window);
    get("advantage_normalization", c.advantage_normalization);
    get("ca_hidden", c.ca_hidden);
    get("sa_hidden", c.sa_hidden);
    get("meta_hidden", c.meta_hidden);
    get("federation_period_episodes", c.federation_period_episodes);
    get("meta_concurrent_training", c.meta_concurrent_training);
    get("nlts_retrain_epochs", c.nlts_retrain_epochs);
    get("nlts_history_capacity", c.nlts_history_capacity);
    get("summary_tail_episodes", c.summary_tail_episodes);
    get("norm_sinr_min_db", c.norm_sinr_min_db);
    get("norm_sinr_max_db", c.norm_sinr_max_db);
    get("norm_latency_max_ms", c.norm_latency_max_ms);
    get("norm_occupancy_frames", c.norm_occupancy_frames);
    get("norm_symbols_max", c.norm_symbols_max);
    get("norm_reward_min", c.norm_reward_min);
    get("trace", c.trace);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config type error: ") + e.what());
  }

  c.validate();
  return c;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

}  // namespace tdsim
