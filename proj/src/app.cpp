#include "tdsim/app.hpp"

#include <cassert>
#include <stdexcept>

namespace tdsim {

const std::array<CompressionConfig, 3>& compression_table() {
  static const std::array<CompressionConfig, 3> table = {{
      {CompressionLabel::C1, 8, 10, 21.25, 8.21, 0.257},
      {CompressionLabel::C2, 9, 5, 31.35, 6.97, 0.572},
      {CompressionLabel::C3, 10, 0, 41.35, 5.50, 0.686},
  }};
  return table;
}

const CompressionConfig& compression_config(CompressionLabel label) {
  return compression_table()[static_cast<int>(label)];
}

const CompressionConfig& compression_config(const std::string& name) {
  if (name == "C1") return compression_table()[0];
  if (name == "C2") return compression_table()[1];
  if (name == "C3") return compression_table()[2];
  throw std::invalid_argument("unknown compression configuration '" + name +
                              "'");
}

std::string to_string(CompressionLabel label) {
  switch (label) {
    case CompressionLabel::C1: return "C1";
    case CompressionLabel::C2: return "C2";
    case CompressionLabel::C3: return "C3";
  }
  return "?";
}

double frame_size_bits(const CompressionConfig& config, double fps) {
  assert(fps > 0.0);
  return config.rate_mbps * 1e6 / fps;
}

Frame generate_frame(int ue_id, double now_ms, std::uint64_t seq,
                     const CompressionConfig& action, const SimConfig& cfg) {
  Frame f;
  f.ue_id = ue_id;
  f.seq = seq;
  f.gen_time_ms = now_ms;
  f.size_bits = frame_size_bits(action, cfg.lidar_fps);
  f.enc_delay_ms = action.enc_delay_ms;
  f.map_value = action.map_value;
  f.label = action.label;
  return f;
}

}  // namespace tdsim
