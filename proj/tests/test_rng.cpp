#include "doctest.h"
#include "heff/rng.hpp"

#include <cmath>

using namespace heff;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors from the Random123 distribution.
  auto block = Philox::block(0, 0, 0);
  CHECK(block[0] == 0x6627e8d5u);
  CHECK(block[1] == 0xe169c58du);
  CHECK(block[2] == 0xbc57ac4cu);
  CHECK(block[3] == 0x9b00dbd8u);

  block = Philox::block(0xffffffffffffffffull, 0xffffffffffffffffull,
                        0xffffffffffffffffull);
  CHECK(block[0] == 0x408f276du);
  CHECK(block[1] == 0x41c83b0eu);
  CHECK(block[2] == 0xa20bc7c6u);
  CHECK(block[3] == 0x6d5451fdu);

  block = Philox::block(0x299f31d0a4093822ull, 0x0370734413198a2eull,
                        0x85a308d3243f6a88ull);
  CHECK(block[0] == 0xd16cfe09u);
  CHECK(block[1] == 0x94fdccebu);
  CHECK(block[2] == 0x5001e420u);
  CHECK(block[3] == 0x24126ea1u);
}

TEST_CASE("streams are independent and reproducible") {
  Philox a(42, make_stream(StreamPurpose::test, 1));
  Philox b(42, make_stream(StreamPurpose::test, 1));
  Philox c(42, make_stream(StreamPurpose::test, 2));
  bool streams_differ = false;
  for (int k = 0; k < 64; ++k) {
    const auto va = a.next_u32();
    CHECK(va == b.next_u32());
    if (va != c.next_u32()) streams_differ = true;
  }
  CHECK(streams_differ);
}

TEST_CASE("uniform range and normal moments") {
  Philox rng(7, make_stream(StreamPurpose::test, 0));
  double mean = 0.0, var = 0.0;
  const int samples = 20000;
  for (int k = 0; k < samples; ++k) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.normal();
    mean += g;
    var += g * g;
  }
  mean /= samples;
  var = var / samples - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}
