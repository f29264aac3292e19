#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/linalg.hpp"
#include "core/types.hpp"
#include "sde/field.hpp"

namespace fw {

enum class DomainKind { interval, box, ball, sublevel };

struct BoundaryPoint {
  Vec point;
  Vec normal;  // unit outward
};

// Bounded open domain with a designated attractor in its interior. Supported
// kinds: interval (d=1), axis-aligned box, Euclidean ball, and {V < c}
// sublevel sets in d=1 (the component containing the attractor is
// materialized as an interval at construction).
class Domain {
 public:
  static Domain interval(double lo, double hi, double attractor);
  static Domain box(const Vec& lo, const Vec& hi, const Vec& attractor);
  static Domain ball(const Vec& center, double radius, const Vec& attractor);
  static Domain sublevel(std::function<double(const Vec&)> potential, double level,
                         double attractor, double scan_lo = -50.0,
                         double scan_hi = 50.0);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& attractor() const { return attractor_; }

  bool contains(const Vec& x) const;
  // Negative inside, positive outside, zero on the boundary. Exact for
  // interval/box/ball; for 1-d sublevel sets it is the distance to the
  // materialized component interval.
  double signed_distance(const Vec& x) const;
  Vec outward_normal(const Vec& boundary_point) const;

  // n sample points with unit outward normals. Intervals always return both
  // endpoints; balls use equispaced angles (d=2) or a spherical Fibonacci set
  // (d=3); boxes are supported for d<=2.
  std::vector<BoundaryPoint> boundary_sample(int n) const;

  // Position of a boundary point in a fixed [0,1) parametrization of the
  // boundary, used to bin exit locations.
  double boundary_parameter(const Vec& boundary_point) const;
  // Point at parameter value u (inverse of the above, up to the usual
  // wrap-around). Only needed for histogram bin edges and argmin refinement.
  Vec boundary_point_at(double u) const;

  // Interval endpoints (interval / sublevel-1d only).
  double lo1() const;
  double hi1() const;
  double ball_radius() const { return radius_; }
  const Vec& ball_center() const { return center_; }
  const Vec& box_lo() const { return lo_; }
  const Vec& box_hi() const { return hi_; }
  double sublevel_c() const { return level_c_; }
  const std::function<double(const Vec&)>& sublevel_potential() const { return potential_; }

 private:
  Domain() = default;

  DomainKind kind_ = DomainKind::interval;
  int dim_ = 1;
  Vec attractor_;
  Vec lo_, hi_;                                  // interval / box / sublevel component
  Vec center_;                                   // ball
  double radius_ = 0.0;                          // ball
  std::function<double(const Vec&)> potential_;  // sublevel
  double level_c_ = 0.0;
  double scan_lo_ = 0.0, scan_hi_ = 0.0;
};

struct ProbeConfig {
  int a1_boundary_probes = 32;
  double a1_horizon = 50.0;
  double a1_tolerance = 1e-3;
  int a2_boundary_samples = 256;
  int a4_samples = 256;
  double jacobian_fd_step = 1e-6;
  std::uint64_t probe_seed = 0x5eed;
};

// Numerical verification of the standing assumptions: A1 flow invariance and
// convergence to the attractor, A2 strict inward drift on the boundary, A3
// negative Jacobian spectrum at the attractor, A4 nondegenerate diffusion.
struct AssumptionReport {
  bool a1_flow_converges = false;
  double a1_worst_terminal_distance = 0.0;
  double a2_min_inward_margin = 0.0;  // min over boundary of -<b, n>
  double a3_jacobian_eigen_max = 0.0;
  double a3_attraction_L = 0.0;  // estimated L in <b(x), x-a> <= -L |x-a|^2
  double a4_sigma_min = 0.0;
  double a4_sigma_max = 0.0;
  bool pass = false;
  std::string detail;
};

AssumptionReport check_assumptions(const Domain& domain, const CoefficientField& field,
                                   const ProbeConfig& probe = {});

// Minkowski rho-inflation (interval/box/ball) or level raise (sublevel). The
// candidate is validated (A1, A2, A4) against the base field before being
// returned; a failed validation throws naming the violated assumption and a
// witness point.
Domain enlarge(const Domain& domain, double rho, const CoefficientField& base_field);

// Post-hoc first-exit scan over a stored path, with the same interpolation
// semantics as simulate_until_exit.
ExitRecord first_exit_scan(const PathSample& path, const Domain& domain);

enum class HitKind { ball, boundary, censored };

struct HittingRecord {
  double time = 0.0;
  Vec point;
  HitKind kind = HitKind::censored;
};

// First time the path enters the closed ball B_rho(attractor) or leaves the
// domain, whichever comes first.
HittingRecord hitting_time_tau_prime(const PathSample& path, const Domain& domain,
                                     double rho);

// Crossing fraction s in [0,1] where the segment from inside to outside
// crosses the boundary (bisection on the signed distance).
double boundary_crossing_fraction(const Domain& domain, const Vec& inside,
                                  const Vec& outside);

}  // namespace fw
