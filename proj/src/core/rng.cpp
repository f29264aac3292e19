#include "core/rng.hpp"

#include <cmath>

namespace fw {
namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ull;
constexpr std::uint64_t kPhiloxW = 0x9E3779B97F4A7C15ull;

inline void philox_round(std::uint64_t& c0, std::uint64_t& c1, std::uint64_t key) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxM) * c0;
  const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
  const std::uint64_t lo = static_cast<std::uint64_t>(prod);
  c0 = hi ^ key ^ c1;
  c1 = lo;
}

// Philox2x64-10 block function: counter -> two output words.
inline void philox2x64(std::uint64_t c0, std::uint64_t c1, std::uint64_t key,
                       std::uint64_t& out0, std::uint64_t& out1) {
  for (int round = 0; round < 10; ++round) {
    philox_round(c0, c1, key);
    key += kPhiloxW;
  }
  out0 = c0;
  out1 = c1;
}

}  // namespace

std::uint64_t RngStream::next_u64() {
  if (has_pending_) {
    has_pending_ = false;
    return pending_;
  }
  std::uint64_t out0, out1;
  philox2x64(block_++, stream_id_, master_seed_, out0, out1);
  pending_ = out1;
  has_pending_ = true;
  return out0;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

std::uint64_t derive_stream_id(std::string_view label, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto absorb = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  for (char c : label) absorb(static_cast<std::uint8_t>(c));
  for (int i = 0; i < 8; ++i) absorb(static_cast<std::uint8_t>(index >> (8 * i)));
  return h;
}

}  // namespace fw
