#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "core/linalg.hpp"
#include "core/rng.hpp"

namespace fw {

// Drift/diffusion pair (t, x) -> R^d / R^{dxd}. Autonomous fields ignore t;
// the flag is trusted by callers that require time-independence (assumption
// checks, quasipotential) and can be spot-checked with check_autonomy.
struct CoefficientField {
  int dim = 1;
  std::function<Vec(double, const Vec&)> drift;
  std::function<Mat(double, const Vec&)> diffusion;
  bool autonomous = true;
  std::optional<double> lipschitz_estimate;

  Vec drift_at(double t, const Vec& x) const { return drift(t, x); }
  Mat diffusion_at(double t, const Vec& x) const { return diffusion(t, x); }
};

// Convenience constructor for autonomous fields given as x -> b(x), x -> s(x).
CoefficientField make_autonomous_field(int dim,
                                       std::function<Vec(const Vec&)> drift,
                                       std::function<Mat(const Vec&)> diffusion,
                                       std::optional<double> lipschitz = {});

// Spot-checks drift(t,x) == drift(0,x) (and same for the diffusion) on random
// (t, x) pairs. Returns the worst discrepancy found.
double check_autonomy(const CoefficientField& field, RngStream& stream,
                      int n_probes = 32, double t_max = 100.0, double x_range = 2.0);

struct IntegratorConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  int store_every = 1;

  void validate() const;
  std::int64_t n_steps() const;
};

// Time-gridded trajectory. times[0] == 0 and the grid is strictly increasing;
// the final point is always stored even when thinning.
struct PathSample {
  std::vector<double> times;
  std::vector<Vec> states;
  SeedTag seed_tag;

  std::size_t size() const { return times.size(); }
};

// Paths whose coordinates pass this bound are treated as divergent: that
// signals a misconfigured field rather than a legitimate excursion.
inline constexpr double kDivergenceGuard = 1e6;

bool state_ok(const Vec& x);

}  // namespace fw
