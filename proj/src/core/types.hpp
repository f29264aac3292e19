#pragma once

#include <cstdint>
#include <optional>

#include "core/linalg.hpp"
#include "core/rng.hpp"

namespace fw {

enum class ExitStatus { exited, censored, diverged };

// One first-exit observation. Censored/diverged records carry no exit point
// and tau equals the time the trajectory was abandoned.
struct ExitRecord {
  double tau = 0.0;
  std::optional<Vec> exit_point;
  ExitStatus status = ExitStatus::censored;
  std::uint64_t replicate_id = 0;
  SeedTag seed_tag;

  bool exited() const { return status == ExitStatus::exited; }
  bool censored() const { return status != ExitStatus::exited; }
};

}  // namespace fw
