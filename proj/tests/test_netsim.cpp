#include <doctest.h>

#include <cmath>

#include "tdsim/netsim.hpp"

using namespace tdsim;

namespace {

SimConfig one_ue_static_g(const std::string& extra = "") {
  std::string doc = R"({"n_ues":1,"regime":"STATIC_G","sinr_spread_db":0)";
  if (!extra.empty()) doc += "," + extra;
  doc += "}";
  return load_config(doc);
}

}  // namespace

TEST_SUITE_BEGIN("netsim");

TEST_CASE("rolling stats: degenerate, hand-computed and eviction cases") {
  RollingStats w(3);
  CHECK(w.summary().mean == 0.0);  // zero-filled before first sample

  w.push(5.0);
  Stat4 s = w.summary();
  CHECK(s.mean == 5.0);
  CHECK(s.min == 5.0);
  CHECK(s.max == 5.0);
  CHECK(s.std == 0.0);

  RollingStats w2(8);
  w2.push(1.0);
  w2.push(2.0);
  w2.push(3.0);
  s = w2.summary();
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.std == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(s.min == 1.0);
  CHECK(s.max == 3.0);
  CHECK(s.min <= s.mean);
  CHECK(s.mean <= s.max);

  // Window of 3: the fourth sample evicts the first.
  w.push(1.0);
  w.push(2.0);
  w.push(100.0);  // evicts the 5.0
  s = w.summary();
  CHECK(s.min == 1.0);
  CHECK(s.max == 100.0);
  CHECK(s.mean == doctest::Approx(103.0 / 3.0));
}

TEST_CASE("symbols_needed: empty, exact division and monotonicity") {
  const SimConfig cfg = load_config("");
  CHECK(symbols_needed(0.0, 5, cfg) == 0);
  // capacity(0) = 32*12*0.2344 = 90.0096 bits/symbol
  CHECK(symbols_needed(1000.0, 0, cfg) == 12);
  CHECK(symbols_needed(90.0096, 0, cfg) == 1);
  for (double occ = 0.0; occ < 5e5; occ += 13337.0)
    CHECK(symbols_needed(2.0 * occ, 10, cfg) >= symbols_needed(occ, 10, cfg));
}

TEST_CASE("a C1 frame at MCS 28 drains over 21 full slots") {
  const SimConfig cfg = one_ue_static_g();
  Engine engine(cfg, 0);
  int drain_slots = 0;
  bool delivered = false;
  double last_drained = 0.0;
  while (!delivered && engine.slot_index() < 2000) {
    engine.begin_slot();
    if (engine.generation_due(0))
      engine.push_frame(0, compression_config("C1"), 1);
    const auto recs = engine.advance_slot({12});
    if (engine.bits_drained() > last_drained) {
      drain_slots += 1;
      last_drained = engine.bits_drained();
    }
    if (!recs.empty()) delivered = true;
  }
  CHECK(delivered);
  CHECK(drain_slots == 21);  // ceil(708333.3 / (12 * 2844.0))
}

TEST_CASE("single-slot transmission: e2e = encoding + slot + backhaul") {
  // Wide allocation so a C3 frame fits in one slot.
  SimConfig cfg = one_ue_static_g(R"("n_prb":1300)");
  Engine engine(cfg, 0);
  std::vector<DeliveryRecord> recs;
  while (recs.empty() && engine.slot_index() < 200) {
    engine.begin_slot();
    if (engine.generation_due(0))
      engine.push_frame(0, compression_config("C3"), 1);
    recs = engine.advance_slot({12});
  }
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].e2e_latency_ms == doctest::Approx(15.625).epsilon(0.001));
  CHECK(recs[0].deadline_met == (recs[0].e2e_latency_ms <= 50.0));
  CHECK(recs[0].deadline_met);
  // Radio segment is the slot-grid rounding of a one-slot transmission.
  CHECK(recs[0].radio_latency_ms < 2.0 * cfg.slot_ms());
  CHECK(recs[0].e2e_latency_ms ==
        doctest::Approx(5.50 + recs[0].radio_latency_ms + 10.0));
}

TEST_CASE("outage slots stall the queue without losing bits") {
  SimConfig cfg = load_config(
      R"({"n_ues":1,"regime":"STATIC_B","sinr_spread_db":0,"outage_prob_b":1})");
  Engine engine(cfg, 0);
  for (int i = 0; i < 400; ++i) {
    engine.begin_slot();
    if (engine.generation_due(0))
      engine.push_frame(0, compression_config("C1"), 1);
    const auto recs = engine.advance_slot({12});
    CHECK(recs.empty());
  }
  CHECK(engine.bits_drained() == 0.0);
  CHECK(engine.bits_in_queues() > 0.0);
  CHECK(engine.bits_generated() ==
        doctest::Approx(engine.bits_in_encoding() + engine.bits_in_queues()));
}

TEST_CASE("empty queue: any allocation produces no deliveries or drain") {
  const SimConfig cfg = one_ue_static_g();
  Engine engine(cfg, 0);
  engine.begin_slot();
  const auto recs = engine.advance_slot({12});
  CHECK(recs.empty());
  CHECK(engine.bits_drained() == 0.0);
  CHECK(engine.bits_in_queues() == 0.0);
}

TEST_CASE("bit conservation and per-UE delivery ordering") {
  SimConfig cfg = load_config(
      R"({"n_ues":3,"regime":"DC_1_2","sinr_spread_db":3})");
  Engine engine(cfg, 42);
  auto rng = make_rng(99, RngStream::Sampler);
  std::vector<double> last_delivery(cfg.n_ues, -1.0);
  for (int slot = 0; slot < 4000; ++slot) {
    engine.begin_slot();
    for (int u = 0; u < cfg.n_ues; ++u)
      if (engine.generation_due(u))
        engine.push_frame(u, compression_table()[uniform_int(rng, 3)], 1);
    // Random feasible allocation.
    std::vector<int> alloc(cfg.n_ues, 0);
    int budget = cfg.useful_symbols_per_slot;
    for (int u = 0; u < cfg.n_ues; ++u) {
      alloc[u] = uniform_int(rng, budget + 1);
      budget -= alloc[u];
    }
    for (const auto& rec : engine.advance_slot(alloc)) {
      CHECK(rec.delivery_time_ms >= last_delivery[rec.ue_id]);
      last_delivery[rec.ue_id] = rec.delivery_time_ms;
      CHECK(rec.deadline_met == (rec.e2e_latency_ms <= 50.0));
    }
    if (slot % 500 == 0) {
      CHECK(engine.bits_generated() ==
            doctest::Approx(engine.bits_in_encoding() +
                            engine.bits_in_queues() + engine.bits_drained()));
    }
  }
  CHECK(engine.bits_generated() > 0.0);
  CHECK(engine.bits_drained() > 0.0);
}

TEST_CASE("latency is nonincreasing in allocated symbols") {
  auto run = [&](int symbols) {
    const SimConfig cfg = one_ue_static_g();
    Engine engine(cfg, 0);
    std::vector<double> latencies;
    while (latencies.size() < 40 && engine.slot_index() < 100000) {
      engine.begin_slot();
      if (engine.generation_due(0))
        engine.push_frame(0, compression_config("C2"), 1);
      for (const auto& rec : engine.advance_slot({symbols}))
        latencies.push_back(rec.e2e_latency_ms);
    }
    return latencies;
  };
  const auto lat4 = run(4);
  const auto lat8 = run(8);
  const auto lat12 = run(12);
  REQUIRE(lat4.size() == 40);
  REQUIRE(lat8.size() == 40);
  REQUIRE(lat12.size() == 40);
  for (int i = 0; i < 40; ++i) {
    CHECK(lat8[i] <= lat4[i] + 1e-9);
    CHECK(lat12[i] <= lat8[i] + 1e-9);
  }
}

TEST_CASE("steady single-UE C1 flow stays periodic and under the deadline") {
  const SimConfig cfg = one_ue_static_g();
  Engine engine(cfg, 0);
  std::vector<double> latencies;
  while (latencies.size() < 90 && engine.slot_index() < 500000) {
    engine.begin_slot();
    if (engine.generation_due(0))
      engine.push_frame(0, compression_config("C1"), 1);
    for (const auto& rec : engine.advance_slot({12}))
      latencies.push_back(rec.e2e_latency_ms);
  }
  REQUIRE(latencies.size() == 90);
  double lo = latencies[45], hi = latencies[45];
  for (std::size_t i = 45; i < latencies.size(); ++i) {
    CHECK(latencies[i] < 50.0);
    lo = std::min(lo, latencies[i]);
    hi = std::max(hi, latencies[i]);
  }
  // Queue is stable: per-frame latency settles to within one slot of jitter.
  CHECK(hi - lo <= 2.0 * cfg.slot_ms() + 1e-9);
}

TEST_CASE("app PRR dips while frames are in flight and recovers") {
  const SimConfig cfg = one_ue_static_g();
  Engine engine(cfg, 0);
  for (int i = 0; i < 20000; ++i) {
    engine.begin_slot();
    if (engine.generation_due(0))
      engine.push_frame(0, compression_config("C1"), 1);
    engine.advance_slot({12});
  }
  const UeSnapshot s = engine.snapshot(0);
  CHECK(s.app_prr.mean > 0.5);
  CHECK(s.app_prr.max <= 1.0);
  CHECK(s.app_prr.min >= 0.0);
  CHECK(engine.frames_delivered(0) > 0);
}

TEST_SUITE_END();
