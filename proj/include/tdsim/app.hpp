// LiDAR application model: fixed-rate frame source and the Draco compression
// configuration table (rate, encoding delay, detection quality).
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tdsim/config.hpp"

namespace tdsim {

enum class CompressionLabel : int { C1 = 0, C2 = 1, C3 = 2 };

struct CompressionConfig {
  CompressionLabel label;
  int quantization_bits;  // q
  int compression_level;  // c
  double rate_mbps;
  double enc_delay_ms;
  double map_value;
};

// The three operating points measured on the SELMA dataset.
const std::array<CompressionConfig, 3>& compression_table();

const CompressionConfig& compression_config(CompressionLabel label);
const CompressionConfig& compression_config(const std::string& name);
std::string to_string(CompressionLabel label);

// Bits in one compressed frame at the given source frame rate.
double frame_size_bits(const CompressionConfig& config, double fps);

struct Frame {
  int ue_id = 0;
  std::uint64_t seq = 0;
  double gen_time_ms = 0.0;
  double size_bits = 0.0;
  double enc_delay_ms = 0.0;
  double map_value = 0.0;
  CompressionLabel label = CompressionLabel::C1;
  int priority = 1;  // scheduling priority attached at generation
};

// Stamps a new frame with the chosen compression configuration. The frame is
// eligible for transmission only after gen_time + enc_delay has elapsed.
Frame generate_frame(int ue_id, double now_ms, std::uint64_t seq,
                     const CompressionConfig& action, const SimConfig& cfg);

}  // namespace tdsim
