#include "tdsim/netsim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace tdsim {

Stat4 RollingStats::summary() const {
  Stat4 s;
  if (samples_.empty()) return s;
  double sum = 0.0;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (double x : samples_) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / samples_.size();
  double var = 0.0;
  for (double x : samples_) var += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(var / samples_.size());
  return s;
}

double RollingStats::sum() const {
  double t = 0.0;
  for (double x : samples_) t += x;
  return t;
}

std::int64_t symbols_needed(double occupancy_bits, int mcs,
                            const SimConfig& cfg) {
  assert(occupancy_bits >= 0.0);
  if (occupancy_bits <= 0.0) return 0;
  return static_cast<std::int64_t>(
      std::ceil(occupancy_bits / symbol_capacity_bits(mcs, cfg)));
}

Engine::UeState::UeState(const SimConfig& cfg, std::mt19937_64 rng)
    : channel(cfg, std::move(rng)),
      app_latency(cfg.layer_stats_window),
      app_prr(cfg.layer_stats_window),
      phy_latency(cfg.layer_stats_window),
      phy_service(cfg.layer_stats_window),
      occupancy(cfg.layer_stats_window),
      sinr_window(cfg.layer_stats_window),
      mcs_window(cfg.layer_stats_window),
      delivered_bytes(cfg.layer_stats_window) {}

Engine::Engine(const SimConfig& cfg, std::uint64_t master_seed,
               std::uint64_t episode)
    : cfg_(&cfg) {
  ues_.reserve(cfg.n_ues);
  for (int u = 0; u < cfg.n_ues; ++u) {
    ues_.emplace_back(
        cfg, make_rng(master_seed, RngStream::Channel,
                      episode * static_cast<std::uint64_t>(cfg.n_ues) + u));
    // Staggered generation phases avoid a synchronized burst every period.
    ues_[u].next_gen_time_ms = cfg.frame_period_ms() * u / cfg.n_ues;
  }
}

void Engine::begin_slot() {
  const double t_end = slot_end_ms();
  for (auto& ue : ues_) {
    if (slot_ > 0) ue.channel.step();
    ue.sinr_window.push(ue.channel.state().sinr_db);
    ue.mcs_window.push(ue.channel.mcs());
    // Frames become servable in the slot their encoding completes.
    while (!ue.encoding.empty() &&
           ue.encoding.front().enqueue_time_ms <= t_end) {
      ue.queue.pending.push_back(ue.encoding.front());
      ue.queue.occupancy_bits += ue.encoding.front().remaining_bits;
      ue.encoding.pop_front();
    }
  }
}

bool Engine::generation_due(int ue) const {
  return ues_[ue].next_gen_time_ms < slot_end_ms();
}

const Frame& Engine::push_frame(int ue, const CompressionConfig& action,
                                int priority) {
  UeState& u = ues_[ue];
  // Occupancy is sampled at the decision instant, before this frame lands.
  u.occupancy.push(u.queue.occupancy_bits);

  Frame f = generate_frame(ue, u.next_gen_time_ms, u.next_seq, action, *cfg_);
  f.priority = priority;
  UeQueue::Entry e{f, f.size_bits, f.gen_time_ms + f.enc_delay_ms};
  u.encoding.push_back(e);

  u.next_seq += 1;
  u.next_gen_time_ms += cfg_->frame_period_ms();
  bits_generated_ += f.size_bits;

  const int w = cfg_->layer_stats_window;
  u.gen_ring.push_back(false);
  u.gen_ring_seq.push_back(f.seq);
  if (static_cast<int>(u.gen_ring.size()) > w) {
    u.gen_ring.pop_front();
    u.gen_ring_seq.pop_front();
  }
  double delivered = 0.0;
  for (bool d : u.gen_ring) delivered += d ? 1.0 : 0.0;
  u.app_prr.push(delivered / u.gen_ring.size());

  return u.encoding.back().frame;
}

std::int64_t Engine::demand_symbols(int ue) const {
  return symbols_needed(ues_[ue].queue.occupancy_bits, ues_[ue].channel.mcs(),
                        *cfg_);
}

std::vector<DeliveryRecord> Engine::advance_slot(
    const std::vector<int>& allocation) {
  assert(static_cast<int>(allocation.size()) == cfg_->n_ues);
  int total = 0;
  for (int a : allocation) {
    assert(a >= 0);
    total += a;
  }
  assert(total <= cfg_->useful_symbols_per_slot);
  (void)total;

  const double t_end = slot_end_ms();
  std::vector<DeliveryRecord> deliveries;
  SlotTrace trace;
  if (trace_sink_) {
    trace.slot = slot_;
    trace.now_ms = now_ms_;
    trace.ues.reserve(ues_.size());
  }

  for (int uidx = 0; uidx < cfg_->n_ues; ++uidx) {
    UeState& u = ues_[uidx];
    const bool outage = u.channel.state().outage;
    double drained = 0.0;

    if (allocation[uidx] > 0 && !u.queue.pending.empty())
      u.phy_service.push(outage ? 0.0 : 1.0);

    if (!outage && allocation[uidx] > 0) {
      double budget = allocation[uidx] * u.channel.capacity_bits_per_symbol();
      while (budget > 0.0 && !u.queue.pending.empty()) {
        auto& entry = u.queue.pending.front();
        const double take = std::min(budget, entry.remaining_bits);
        entry.remaining_bits -= take;
        u.queue.occupancy_bits -= take;
        budget -= take;
        drained += take;
        if (entry.remaining_bits <= 1e-9) {
          const Frame& f = entry.frame;
          DeliveryRecord rec;
          rec.ue_id = f.ue_id;
          rec.seq = f.seq;
          rec.delivery_time_ms = t_end + cfg_->backhaul_delay_ms;
          rec.e2e_latency_ms = rec.delivery_time_ms - f.gen_time_ms;
          rec.radio_latency_ms = t_end - entry.enqueue_time_ms;
          rec.map_value = f.map_value;
          rec.label = f.label;
          rec.priority = f.priority;
          rec.deadline_met = rec.e2e_latency_ms <= cfg_->latency_threshold_ms;
          deliveries.push_back(rec);

          u.frames_delivered += 1;
          u.app_latency.push(rec.e2e_latency_ms);
          u.phy_latency.push(rec.radio_latency_ms);
          u.delivered_bytes.push(f.size_bits / 8.0);
          for (std::size_t i = 0; i < u.gen_ring_seq.size(); ++i)
            if (u.gen_ring_seq[i] == f.seq) u.gen_ring[i] = true;
          u.queue.pending.pop_front();
        } else {
          break;  // budget exhausted mid-frame
        }
      }
      if (u.queue.occupancy_bits < 1e-9) u.queue.occupancy_bits = 0.0;
    }
    bits_drained_ += drained;

    if (trace_sink_) {
      trace.ues.push_back(
          {u.channel.state().state == ChainState::G ? 'G' : 'B',
           u.channel.state().sinr_db, u.channel.mcs(), outage,
           allocation[uidx], drained, u.queue.occupancy_bits});
    }
  }

  if (trace_sink_) trace_sink_(trace);
  now_ms_ = t_end;
  slot_ += 1;
  return deliveries;
}

UeSnapshot Engine::snapshot(int ue) const {
  const UeState& u = ues_[ue];
  UeSnapshot s;
  s.channel_valid = slot_ > 0 || !u.sinr_window.empty();
  s.sinr_db = u.channel.state().sinr_db;
  s.mcs = u.channel.mcs();
  s.symbols_needed = static_cast<double>(demand_symbols(ue));
  s.app_latency = u.app_latency.summary();
  s.app_prr = u.app_prr.summary();
  s.phy_latency = u.phy_latency.summary();
  s.phy_prr_mean = u.phy_service.mean();
  s.occupancy_bits = u.occupancy.summary();
  s.occupancy_instant_bits = u.queue.occupancy_bits;
  s.window_mean_sinr_db = u.sinr_window.mean();
  s.window_mean_mcs = u.mcs_window.mean();
  s.window_delivered_bytes = u.delivered_bytes.sum();
  return s;
}

double Engine::bits_in_encoding() const {
  double t = 0.0;
  for (const auto& u : ues_)
    for (const auto& e : u.encoding) t += e.remaining_bits;
  return t;
}

double Engine::bits_in_queues() const {
  double t = 0.0;
  for (const auto& u : ues_) t += u.queue.occupancy_bits;
  return t;
}

}  // namespace tdsim
