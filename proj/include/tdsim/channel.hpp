// Two-state Markov channel per UE: SINR sampling, outage, and the
// SINR -> MCS -> per-symbol capacity mapping.
#pragma once

#include "tdsim/config.hpp"
#include "tdsim/rng.hpp"

namespace tdsim {

enum class ChainState { G, B };

struct ChannelState {
  ChainState state = ChainState::G;
  double sinr_db = 0.0;
  bool outage = false;  // only ever true in state B
};

// One chain transition: from G move to B with probability p_gb, from B move
// to G with probability p_bg.
ChainState step_markov(ChainState current, double p_gb, double p_bg,
                       std::mt19937_64& rng);

// Draws (sinr_db, outage) for the given chain state. SINR is Gaussian around
// the per-state mean, truncated at +-sinr_truncation_db; spread 0 degenerates
// to the mean. Outage can only occur in state B.
std::pair<double, bool> sample_sinr(ChainState state, std::mt19937_64& rng,
                                    const SimConfig& cfg);

// Largest index whose threshold does not exceed sinr_db; 0 below all cutoffs.
int sinr_to_mcs(double sinr_db, const McsTable& table);

// Bits carried by one OFDM symbol at the given MCS across the full band:
// n_prb * 12 subcarriers * spectral efficiency.
double symbol_capacity_bits(int mcs, const SimConfig& cfg);

// Stationary fraction of time spent in B: p_gb / (p_gb + p_bg).
double stationary_bad_fraction(double p_gb, double p_bg);

// Per-UE chain owned by an episode runner; refreshed once per slot.
class MarkovChannel {
 public:
  MarkovChannel(const SimConfig& cfg, std::mt19937_64 rng)
      : cfg_(&cfg), rng_(std::move(rng)) {
    state_.state =
        cfg.regime == Regime::StaticB ? ChainState::B : ChainState::G;
    refresh();
  }

  void step() {
    state_.state = step_markov(state_.state, cfg_->p_gb, cfg_->p_bg, rng_);
    refresh();
  }

  const ChannelState& state() const { return state_; }
  int mcs() const { return mcs_; }
  double capacity_bits_per_symbol() const { return capacity_; }

 private:
  void refresh() {
    auto [sinr, outage] = sample_sinr(state_.state, rng_, *cfg_);
    state_.sinr_db = sinr;
    state_.outage = outage;
    mcs_ = sinr_to_mcs(sinr, cfg_->mcs_table);
    capacity_ = symbol_capacity_bits(mcs_, *cfg_);
  }

  const SimConfig* cfg_;
  std::mt19937_64 rng_;
  ChannelState state_;
  int mcs_ = 0;
  double capacity_ = 0.0;
};

}  // namespace tdsim
