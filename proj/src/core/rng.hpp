#pragma once

#include <cstdint>
#include <string_view>

namespace fw {

// Counter-based random stream (Philox2x64-10). A stream is fully determined
// by (master_seed, stream_id): the key is the master seed, the 128-bit counter
// block is (block_index, stream_id). Distinct stream ids give statistically
// independent sequences, so replicate-level parallelism is reproducible no
// matter how work is scheduled.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; one spare value is cached.
  double normal();

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::uint64_t pending_ = 0;
  bool has_pending_ = false;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

// FNV-1a over the label bytes, then over the replicate index. This is the
// documented stream-id derivation: external tooling can replay any single
// replicate from (master_seed, label, index) alone.
std::uint64_t derive_stream_id(std::string_view label, std::uint64_t index);

struct SeedTag {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  bool operator==(const SeedTag&) const = default;
};

}  // namespace fw
