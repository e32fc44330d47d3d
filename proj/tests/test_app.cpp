#include <doctest.h>

#include "tdsim/app.hpp"

using namespace tdsim;

TEST_SUITE_BEGIN("app");

TEST_CASE("compression table carries the three measured operating points") {
  const auto& t = compression_table();
  REQUIRE(t.size() == 3);

  CHECK(t[0].quantization_bits == 8);
  CHECK(t[0].compression_level == 10);
  CHECK(t[0].rate_mbps == 21.25);
  CHECK(t[0].enc_delay_ms == 8.21);
  CHECK(t[0].map_value == 0.257);

  CHECK(t[1].quantization_bits == 9);
  CHECK(t[1].compression_level == 5);
  CHECK(t[1].rate_mbps == 31.35);
  CHECK(t[1].enc_delay_ms == 6.97);
  CHECK(t[1].map_value == 0.572);

  CHECK(t[2].quantization_bits == 10);
  CHECK(t[2].compression_level == 0);
  CHECK(t[2].rate_mbps == 41.35);
  CHECK(t[2].enc_delay_ms == 5.50);
  CHECK(t[2].map_value == 0.686);
}

TEST_CASE("table ordering: rate and quality rise, encoding delay falls") {
  const auto& t = compression_table();
  for (int i = 1; i < 3; ++i) {
    CHECK(t[i].rate_mbps > t[i - 1].rate_mbps);
    CHECK(t[i].map_value > t[i - 1].map_value);
    CHECK(t[i].enc_delay_ms < t[i - 1].enc_delay_ms);
  }
}

TEST_CASE("frame size is rate over frame rate") {
  CHECK(frame_size_bits(compression_config("C1"), 30.0) ==
        doctest::Approx(708333.3).epsilon(1e-6));
  CHECK(frame_size_bits(compression_config("C3"), 30.0) ==
        doctest::Approx(1378333.3).epsilon(1e-6));
  // Doubling the frame rate halves the size.
  for (const auto& c : compression_table())
    CHECK(frame_size_bits(c, 60.0) ==
          doctest::Approx(frame_size_bits(c, 30.0) / 2.0));
}

TEST_CASE("lookup by name matches lookup by label") {
  CHECK(&compression_config("C2") ==
        &compression_config(CompressionLabel::C2));
  CHECK_THROWS_AS(compression_config("C4"), std::invalid_argument);
}

TEST_CASE("generated frames are stamped and sized by the chosen config") {
  const SimConfig cfg = load_config("");
  const Frame f =
      generate_frame(2, 100.0, 7, compression_config("C2"), cfg);
  CHECK(f.ue_id == 2);
  CHECK(f.seq == 7);
  CHECK(f.gen_time_ms == 100.0);
  CHECK(f.enc_delay_ms == 6.97);
  CHECK(f.map_value == 0.572);
  CHECK(f.size_bits ==
        doctest::Approx(frame_size_bits(compression_config("C2"), 30.0)));
}

TEST_SUITE_END();
