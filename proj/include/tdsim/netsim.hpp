// Slot-level uplink engine: per-UE FIFO queues, scheduled symbol service,
// outage stalls, backhaul delay and per-frame end-to-end latency accounting.
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "tdsim/app.hpp"
#include "tdsim/channel.hpp"
#include "tdsim/config.hpp"

namespace tdsim {

struct Stat4 {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Fixed-capacity rolling window with population-convention summaries.
// Empty windows summarize to all zeros.
class RollingStats {
 public:
  explicit RollingStats(int capacity = 20) : capacity_(capacity) {}

  void push(double sample) {
    if (static_cast<int>(samples_.size()) == capacity_) samples_.pop_front();
    samples_.push_back(sample);
  }

  Stat4 summary() const;
  double mean() const { return summary().mean; }
  double sum() const;
  bool empty() const { return samples_.empty(); }
  int size() const { return static_cast<int>(samples_.size()); }

 private:
  int capacity_;
  std::deque<double> samples_;
};

struct DeliveryRecord {
  int ue_id = 0;
  std::uint64_t seq = 0;
  double e2e_latency_ms = 0.0;
  double radio_latency_ms = 0.0;  // queueing + transmission only
  double delivery_time_ms = 0.0;
  double map_value = 0.0;
  CompressionLabel label = CompressionLabel::C1;
  int priority = 1;
  bool deadline_met = false;
};

struct UeQueue {
  struct Entry {
    Frame frame;
    double remaining_bits;
    double enqueue_time_ms;  // when encoding completed
  };
  std::deque<Entry> pending;
  double occupancy_bits = 0.0;
};

// OFDM symbols required to drain the given backlog at the given MCS.
std::int64_t symbols_needed(double occupancy_bits, int mcs,
                            const SimConfig& cfg);

// Measurement snapshot consumed by the agents' state builders.
struct UeSnapshot {
  bool channel_valid = false;
  double sinr_db = 0.0;
  int mcs = 0;
  double symbols_needed = 0.0;
  Stat4 app_latency;   // E2E latency of delivered frames
  Stat4 app_prr;       // delivered/generated ratio samples
  Stat4 phy_latency;   // radio segment of delivered frames
  double phy_prr_mean = 0.0;  // served fraction of scheduled slots
  Stat4 occupancy_bits;
  double occupancy_instant_bits = 0.0;
  double window_mean_sinr_db = 0.0;
  double window_mean_mcs = 0.0;
  double window_delivered_bytes = 0.0;
};

struct SlotTraceUe {
  char chain_state;
  double sinr_db;
  int mcs;
  bool outage;
  int allocated;
  double drained_bits;
  double occupancy_bits;
};

struct SlotTrace {
  std::uint64_t slot;
  double now_ms;
  std::vector<SlotTraceUe> ues;
};

// One engine instance per episode. The runner drives it slot by slot:
//   begin_slot(); ...generate frames / decide allocation...; advance_slot().
class Engine {
 public:
  // Channel randomness derives from (master_seed, episode, ue) so episodes
  // see fresh draws while runs stay reproducible.
  Engine(const SimConfig& cfg, std::uint64_t master_seed,
         std::uint64_t episode = 0);

  double now_ms() const { return now_ms_; }
  double slot_end_ms() const { return now_ms_ + cfg_->slot_ms(); }
  std::uint64_t slot_index() const { return slot_; }

  // Steps every UE's channel chain and admits frames whose encoding
  // completes within this slot.
  void begin_slot();

  // True while the UE's next generation instant falls inside this slot.
  bool generation_due(int ue) const;
  // Creates the next frame for `ue` with the chosen compression and
  // priority; returns the generation timestamp.
  const Frame& push_frame(int ue, const CompressionConfig& action,
                          int priority);

  std::int64_t demand_symbols(int ue) const;
  const MarkovChannel& channel(int ue) const { return ues_[ue].channel; }
  const UeQueue& queue(int ue) const { return ues_[ue].queue; }

  // Serves the slot with the given per-UE symbol grants (sum must not exceed
  // the useful-symbol budget), emits deliveries for frames whose last bit
  // drains, then advances the clock by one slot. Delivered frames complete
  // at end of slot plus the backhaul delay.
  std::vector<DeliveryRecord> advance_slot(const std::vector<int>& allocation);

  UeSnapshot snapshot(int ue) const;

  // Conservation counters (bits): generated = encoding + queued + drained.
  double bits_generated() const { return bits_generated_; }
  double bits_in_encoding() const;
  double bits_in_queues() const;
  double bits_drained() const { return bits_drained_; }

  std::uint64_t frames_generated(int ue) const {
    return ues_[ue].next_seq;
  }
  std::uint64_t frames_delivered(int ue) const {
    return ues_[ue].frames_delivered;
  }

  void set_trace_sink(std::function<void(const SlotTrace&)> sink) {
    trace_sink_ = std::move(sink);
  }

 private:
  struct UeState {
    MarkovChannel channel;
    UeQueue queue;
    std::deque<UeQueue::Entry> encoding;  // waiting for enc delay to elapse
    double next_gen_time_ms = 0.0;
    std::uint64_t next_seq = 0;
    std::uint64_t frames_delivered = 0;

    RollingStats app_latency;
    RollingStats app_prr;
    RollingStats phy_latency;
    RollingStats phy_service;  // 1 = served, 0 = stalled by outage
    RollingStats occupancy;
    RollingStats sinr_window;
    RollingStats mcs_window;
    RollingStats delivered_bytes;
    std::deque<bool> gen_ring;  // delivered flags of recent generations
    std::deque<std::uint64_t> gen_ring_seq;

    UeState(const SimConfig& cfg, std::mt19937_64 rng);
  };

  const SimConfig* cfg_;
  std::vector<UeState> ues_;
  double now_ms_ = 0.0;
  std::uint64_t slot_ = 0;
  double bits_generated_ = 0.0;
  double bits_drained_ = 0.0;
  std::function<void(const SlotTrace&)> trace_sink_;
};

}  // namespace tdsim
