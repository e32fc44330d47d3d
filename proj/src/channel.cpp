#include "tdsim/channel.hpp"

#include <algorithm>
#include <cassert>

namespace tdsim {

ChainState step_markov(ChainState current, double p_gb, double p_bg,
                       std::mt19937_64& rng) {
  assert(p_gb >= 0.0 && p_gb <= 1.0 && p_bg >= 0.0 && p_bg <= 1.0);
  const double u = uniform01(rng);
  if (current == ChainState::G)
    return u < p_gb ? ChainState::B : ChainState::G;
  return u < p_bg ? ChainState::G : ChainState::B;
}

std::pair<double, bool> sample_sinr(ChainState state, std::mt19937_64& rng,
                                    const SimConfig& cfg) {
  const double mean = state == ChainState::G ? cfg.sinr_mean_g_db
                                             : cfg.sinr_mean_b_db;
  double sinr = mean;
  if (cfg.sinr_spread_db > 0.0) {
    const double bound = cfg.sinr_truncation_db;
    // Rejection sampling keeps the shape; the clamp is a fallback for
    // configurations with spread >> bound.
    for (int i = 0; i < 100; ++i) {
      sinr = normal(rng, mean, cfg.sinr_spread_db);
      if (std::abs(sinr - mean) <= bound) break;
      sinr = std::clamp(sinr, mean - bound, mean + bound);
    }
  }
  const double p_out =
      state == ChainState::G ? cfg.outage_prob_g : cfg.outage_prob_b;
  const bool outage = p_out > 0.0 && uniform01(rng) < p_out;
  return {sinr, outage};
}

int sinr_to_mcs(double sinr_db, const McsTable& table) {
  const auto& th = table.thresholds_db;
  auto it = std::upper_bound(th.begin(), th.end(), sinr_db);
  if (it == th.begin()) return 0;
  return static_cast<int>(it - th.begin()) - 1;
}

double symbol_capacity_bits(int mcs, const SimConfig& cfg) {
  assert(mcs >= 0 && mcs < static_cast<int>(cfg.mcs_table.efficiencies.size()));
  return cfg.n_prb * 12.0 * cfg.mcs_table.efficiencies[mcs];
}

double stationary_bad_fraction(double p_gb, double p_bg) {
  if (p_gb + p_bg == 0.0) return 0.0;
  return p_gb / (p_gb + p_bg);
}

}  // namespace tdsim
