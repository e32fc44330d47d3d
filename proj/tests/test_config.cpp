#include <doctest.h>

#include "tdsim/channel.hpp"
#include "tdsim/config.hpp"

using namespace tdsim;

TEST_SUITE_BEGIN("config");

TEST_CASE("empty document yields the default parameter set") {
  const SimConfig c = load_config("");
  CHECK(c.n_ues == 5);
  CHECK(c.latency_threshold_ms == 50.0);
  CHECK(c.priority_levels == 3);
  CHECK(c.gamma == 0.95);
  CHECK(c.gae_lambda == 0.95);
  CHECK(c.learning_rate == 1e-4);
  CHECK(c.ppo_clip == 0.2);
  CHECK(c.ppo_c1 == 0.5);
  CHECK(c.ppo_c2 == 0.01);
  CHECK(c.minibatch == 64);
  CHECK(c.window_w == 1);
  CHECK(c.t_ddql == 8000);
  CHECK(c.t_ppo == 512);
  CHECK(c.t_nlts == 128);
  CHECK(c.lts_rm == 1.0);
  CHECK(c.lts_rho == 0.5);
  CHECK(c.episodes == 250);
  CHECK(c.steps_per_episode == 400);
  CHECK(c.lidar_fps == 30.0);
  CHECK(c.useful_symbols_per_slot == 12);
  CHECK(c.carrier_ghz == 28.0);
  CHECK(c.bandwidth_mhz == 50.0);
  CHECK(c.symbol_duration_us == 8.92);
  CHECK(c.backhaul_delay_ms == 10.0);
  CHECK(c.backhaul_rate_gbps == 100.0);
}

TEST_CASE("scheduling modes require centralized learning") {
  CHECK_THROWS_AS(load_config(R"({"mode":"S","learning":"FEDERATED"})"),
                  ValidationError);
  CHECK_THROWS_AS(load_config(R"({"mode":"ICS","learning":"FEDERATED"})"),
                  ValidationError);
  CHECK_THROWS_AS(load_config(R"({"mode":"CCS","learning":"FEDERATED"})"),
                  ValidationError);
  CHECK_NOTHROW(load_config(R"({"mode":"C","learning":"FEDERATED"})"));
}

TEST_CASE("probability fields are range-checked and named") {
  try {
    load_config(R"({"p_gb":1.2})");
    FAIL("expected validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("p_gb") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config(R"({"outage_prob_b":-0.1})"), ValidationError);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(load_config(R"({"n_ue":4})"), ValidationError);
  CHECK_THROWS_AS(load_config(R"({"frobnicate":true})"), ValidationError);
}

TEST_CASE("malformed documents raise parse errors") {
  CHECK_THROWS_AS(load_config("{not json"), ValidationError);
  CHECK_THROWS_AS(load_config("[1,2,3]"), ValidationError);
}

TEST_CASE("META mode requires a meta algorithm") {
  CHECK_THROWS_AS(load_config(R"({"mode":"META"})"), ValidationError);
  CHECK_NOTHROW(load_config(R"({"mode":"META","meta_algorithm":"LTS"})"));
}

TEST_CASE("latency threshold restricted to the studied deadlines") {
  CHECK_THROWS_AS(load_config(R"({"latency_threshold_ms":40})"),
                  ValidationError);
  CHECK_NOTHROW(load_config(R"({"latency_threshold_ms":30})"));
}

TEST_CASE("channel regimes map to the published transition pairs") {
  CHECK(channel_regime("DC_1_6") == std::pair{0.2, 1.0});
  CHECK(channel_regime("DC_1_2") == std::pair{1.0, 1.0});
  CHECK(channel_regime("STATIC_G") == std::pair{0.0, 1.0});
  CHECK(channel_regime("STATIC_B") == std::pair{1.0, 0.0});
  CHECK_THROWS_AS(channel_regime("GOODISH"), ValidationError);
}

TEST_CASE("regime key sets transition probabilities, explicit keys override") {
  const SimConfig a = load_config(R"({"regime":"DC_1_6"})");
  CHECK(a.p_gb == 0.2);
  CHECK(a.p_bg == 1.0);
  const SimConfig b = load_config(R"({"regime":"DC_1_6","p_gb":0.3})");
  CHECK(b.p_gb == 0.3);
  CHECK(b.p_bg == 1.0);
}

TEST_CASE("stationary bad fraction matches the duty-cycle closed form") {
  auto [gb16, bg16] = channel_regime(Regime::Dc16);
  CHECK(stationary_bad_fraction(gb16, bg16) == doctest::Approx(1.0 / 6.0));
  auto [gb12, bg12] = channel_regime(Regime::Dc12);
  CHECK(stationary_bad_fraction(gb12, bg12) == doctest::Approx(0.5));
}

TEST_CASE("serialization round-trips to an identical configuration") {
  const SimConfig a = load_config(
      R"({"mode":"ICS","latency_threshold_ms":30,"seed":42,
          "regime":"DC_1_2","sinr_spread_db":1.5,"ca_hidden":[32,16]})");
  const SimConfig b = load_config(a.to_json_string());
  CHECK(a == b);
  CHECK(b.to_json_string() == a.to_json_string());
}

TEST_CASE("custom MCS tables are validated") {
  CHECK_THROWS_AS(
      load_config(R"({"mcs_table":[{"threshold_db":0,"efficiency":1}]})"),
      ValidationError);
  const McsTable t = McsTable::nr_default();
  CHECK(t.thresholds_db.size() == 29);
  CHECK(t.efficiencies.front() == 0.2344);
  CHECK(t.efficiencies.back() == 7.4063);
}

TEST_SUITE_END();
