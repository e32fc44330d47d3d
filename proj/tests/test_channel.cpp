#include <doctest.h>

#include "tdsim/channel.hpp"

using namespace tdsim;

TEST_SUITE_BEGIN("channel");

TEST_CASE("zero transition probability pins the chain") {
  auto rng = make_rng(1, RngStream::Channel);
  for (int i = 0; i < 1000; ++i)
    CHECK(step_markov(ChainState::G, 0.0, 0.5, rng) == ChainState::G);
}

TEST_CASE("p_bg = 1 leaves B after exactly one step") {
  auto rng = make_rng(2, RngStream::Channel);
  for (int i = 0; i < 1000; ++i)
    CHECK(step_markov(ChainState::B, 0.2, 1.0, rng) == ChainState::G);
}

TEST_CASE("empirical bad-state fraction matches the stationary solution") {
  auto run = [](double p_gb, double p_bg, std::uint64_t seed) {
    auto rng = make_rng(seed, RngStream::Channel);
    ChainState s = ChainState::G;
    std::int64_t bad = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      s = step_markov(s, p_gb, p_bg, rng);
      if (s == ChainState::B) bad += 1;
    }
    return static_cast<double>(bad) / n;
  };
  CHECK(run(0.2, 1.0, 3) ==
        doctest::Approx(stationary_bad_fraction(0.2, 1.0)).epsilon(0.06));
  CHECK(std::abs(run(0.2, 1.0, 3) - 1.0 / 6.0) < 0.01);
  CHECK(std::abs(run(1.0, 1.0, 4) - 0.5) < 0.01);
  CHECK(std::abs(run(0.0, 1.0, 5) - 0.0) < 1e-12);
  CHECK(std::abs(run(1.0, 0.0, 6) - 1.0) < 1e-12);
}

TEST_CASE("zero spread degenerates SINR to the per-state means") {
  SimConfig cfg = load_config(R"({"sinr_spread_db":0})");
  auto rng = make_rng(7, RngStream::Channel);
  auto [sinr_g, outage_g] = sample_sinr(ChainState::G, rng, cfg);
  CHECK(sinr_g == 30.0);
  CHECK_FALSE(outage_g);
  auto [sinr_b, _] = sample_sinr(ChainState::B, rng, cfg);
  CHECK(sinr_b == 5.0);
}

TEST_CASE("outage frequency matches the configured probabilities") {
  SimConfig cfg = load_config("");
  auto rng = make_rng(8, RngStream::Channel);
  int outages = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i)
    if (sample_sinr(ChainState::B, rng, cfg).second) outages += 1;
  CHECK(std::abs(outages / static_cast<double>(n) - 0.2) < 0.005);

  for (int i = 0; i < 100000; ++i)
    CHECK_FALSE(sample_sinr(ChainState::G, rng, cfg).second);
}

TEST_CASE("SINR samples stay within the truncation bound") {
  SimConfig cfg = load_config(R"({"sinr_spread_db":6})");
  auto rng = make_rng(9, RngStream::Channel);
  for (int i = 0; i < 100000; ++i) {
    auto [sinr, _] = sample_sinr(ChainState::G, rng, cfg);
    CHECK(std::abs(sinr - 30.0) <= cfg.sinr_truncation_db + 1e-12);
  }
}

TEST_CASE("MCS mapping: below all cutoffs and above the top cutoff") {
  const McsTable t = McsTable::nr_default();
  CHECK(sinr_to_mcs(-10.0, t) == 0);
  CHECK(sinr_to_mcs(30.0, t) == 28);
  CHECK(sinr_to_mcs(1e9, t) == 28);
}

TEST_CASE("MCS mapping is a right-continuous monotone step function") {
  const McsTable t = McsTable::nr_default();
  // Exact cutoff hits map to their own index.
  for (int i = 0; i < 29; ++i) {
    CHECK(sinr_to_mcs(t.thresholds_db[i], t) == i);
    CHECK(sinr_to_mcs(t.thresholds_db[i] - 1e-9, t) == std::max(0, i - 1));
  }
  // Monotonicity over random pairs.
  auto rng = make_rng(10, RngStream::Channel);
  for (int i = 0; i < 10000; ++i) {
    const double a = -20.0 + 70.0 * uniform01(rng);
    const double b = -20.0 + 70.0 * uniform01(rng);
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(sinr_to_mcs(lo, t) <= sinr_to_mcs(hi, t));
  }
}

TEST_CASE("symbol capacity follows n_prb x 12 x efficiency") {
  SimConfig cfg = load_config("");
  CHECK(symbol_capacity_bits(0, cfg) ==
        doctest::Approx(90.0).epsilon(0.001));  // 32 * 12 * 0.2344
  CHECK(symbol_capacity_bits(28, cfg) ==
        doctest::Approx(32 * 12 * 7.4063).epsilon(1e-12));
  for (int m = 1; m <= 28; ++m)
    CHECK(symbol_capacity_bits(m, cfg) > symbol_capacity_bits(m - 1, cfg));

  SimConfig doubled = cfg;
  doubled.n_prb = 64;
  for (int m = 0; m <= 28; ++m)
    CHECK(symbol_capacity_bits(m, doubled) ==
          doctest::Approx(2.0 * symbol_capacity_bits(m, cfg)));
}

TEST_CASE("chains start in the regime's absorbing state") {
  SimConfig g = load_config(R"({"regime":"STATIC_G","sinr_spread_db":0})");
  CHECK(MarkovChannel(g, make_rng(1, RngStream::Channel)).state().state ==
        ChainState::G);
  SimConfig b = load_config(R"({"regime":"STATIC_B","sinr_spread_db":0})");
  MarkovChannel cb(b, make_rng(1, RngStream::Channel));
  CHECK(cb.state().state == ChainState::B);
  for (int i = 0; i < 100; ++i) {
    cb.step();
    CHECK(cb.state().state == ChainState::B);
    CHECK(cb.state().sinr_db == 5.0);
  }
}

TEST_SUITE_END();
