#include "geom/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "sde/integrate.hpp"

namespace fw {

namespace {

// Root of f on [lo, hi] with f(lo), f(hi) of opposite sign.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Domain Domain::interval(double lo, double hi, double attractor) {
  if (!(lo < hi)) throw ValidationError("interval requires lo < hi");
  if (!(lo < attractor && attractor < hi))
    throw ValidationError("attractor must lie inside the interval");
  Domain d;
  d.kind_ = DomainKind::interval;
  d.dim_ = 1;
  d.lo_ = vec1(lo);
  d.hi_ = vec1(hi);
  d.attractor_ = vec1(attractor);
  return d;
}

Domain Domain::box(const Vec& lo, const Vec& hi, const Vec& attractor) {
  if (lo.size() != hi.size() || lo.size() != attractor.size())
    throw ValidationError("box: dimension mismatch");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo(i) < hi(i))) throw ValidationError("box requires lo < hi componentwise");
    if (!(lo(i) < attractor(i) && attractor(i) < hi(i)))
      throw ValidationError("attractor must lie inside the box");
  }
  Domain d;
  d.kind_ = DomainKind::box;
  d.dim_ = static_cast<int>(lo.size());
  d.lo_ = lo;
  d.hi_ = hi;
  d.attractor_ = attractor;
  return d;
}

Domain Domain::ball(const Vec& center, double radius, const Vec& attractor) {
  if (!(radius > 0.0)) throw ValidationError("ball radius must be positive");
  if (center.size() != attractor.size()) throw ValidationError("ball: dimension mismatch");
  if (!((attractor - center).norm() < radius))
    throw ValidationError("attractor must lie inside the ball");
  Domain d;
  d.kind_ = DomainKind::ball;
  d.dim_ = static_cast<int>(center.size());
  d.center_ = center;
  d.radius_ = radius;
  d.attractor_ = attractor;
  return d;
}

Domain Domain::sublevel(std::function<double(const Vec&)> potential, double level,
                        double attractor, double scan_lo, double scan_hi) {
  const auto g = [&](double x) { return potential(vec1(x)) - level; };
  if (!(g(attractor) < 0.0))
    throw ValidationError("attractor must satisfy V(a) < c");
  // Walk outward from the attractor on a fine grid to bracket the two roots of
  // V - c enclosing the component.
  const int n_scan = 100000;
  const double step_lo = (attractor - scan_lo) / n_scan;
  const double step_hi = (scan_hi - attractor) / n_scan;
  double lo = scan_lo, hi = scan_hi;
  bool lo_found = false, hi_found = false;
  for (int i = 1; i <= n_scan; ++i) {
    const double x = attractor - i * step_lo;
    if (g(x) >= 0.0) {
      lo = bisect([&](double u) { return g(u); }, x, x + step_lo);
      lo_found = true;
      break;
    }
  }
  for (int i = 1; i <= n_scan; ++i) {
    const double x = attractor + i * step_hi;
    if (g(x) >= 0.0) {
      hi = bisect([&](double u) { return g(u); }, x - step_hi, x);
      hi_found = true;
      break;
    }
  }
  if (!lo_found || !hi_found)
    throw ValidationError("sublevel component is unbounded on the scan window");
  Domain d;
  d.kind_ = DomainKind::sublevel;
  d.dim_ = 1;
  d.lo_ = vec1(lo);
  d.hi_ = vec1(hi);
  d.attractor_ = vec1(attractor);
  d.potential_ = std::move(potential);
  d.level_c_ = level;
  d.scan_lo_ = scan_lo;
  d.scan_hi_ = scan_hi;
  return d;
}

bool Domain::contains(const Vec& x) const { return signed_distance(x) < 0.0; }

double Domain::signed_distance(const Vec& x) const {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::sublevel:
      return std::max(lo_(0) - x(0), x(0) - hi_(0));
    case DomainKind::box: {
      double d = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < x.size(); ++i)
        d = std::max(d, std::max(lo_(i) - x(i), x(i) - hi_(i)));
      return d;
    }
    case DomainKind::ball:
      return (x - center_).norm() - radius_;
  }
  return 0.0;
}

Vec Domain::outward_normal(const Vec& x) const {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::sublevel:
      return vec1(std::abs(x(0) - lo_(0)) < std::abs(x(0) - hi_(0)) ? -1.0 : 1.0);
    case DomainKind::box: {
      // Face with the smallest slack.
      Eigen::Index best = 0;
      double best_slack = std::numeric_limits<double>::infinity();
      double sign = 1.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x(i) - lo_(i)) < best_slack) {
          best_slack = std::abs(x(i) - lo_(i));
          best = i;
          sign = -1.0;
        }
        if (std::abs(hi_(i) - x(i)) < best_slack) {
          best_slack = std::abs(hi_(i) - x(i));
          best = i;
          sign = 1.0;
        }
      }
      Vec n = Vec::Zero(x.size());
      n(best) = sign;
      return n;
    }
    case DomainKind::ball: {
      Vec n = x - center_;
      const double len = n.norm();
      if (len == 0.0) throw ValidationError("normal undefined at the ball center");
      return n / len;
    }
  }
  return Vec();
}

std::vector<BoundaryPoint> Domain::boundary_sample(int n) const {
  if (n < 1) throw ValidationError("boundary_sample requires n >= 1");
  std::vector<BoundaryPoint> out;
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::sublevel:
      out.push_back({lo_, vec1(-1.0)});
      out.push_back({hi_, vec1(1.0)});
      return out;
    case DomainKind::ball: {
      if (dim_ == 1) {
        out.push_back({center_ - vec1(radius_), vec1(-1.0)});
        out.push_back({center_ + vec1(radius_), vec1(1.0)});
        return out;
      }
      if (dim_ == 2) {
        out.reserve(n);
        for (int i = 0; i < n; ++i) {
          const double angle = 2.0 * M_PI * i / n;
          Vec dir = vec2(std::cos(angle), std::sin(angle));
          out.push_back({center_ + radius_ * dir, dir});
        }
        return out;
      }
      if (dim_ == 3) {
        // Spherical Fibonacci set.
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        out.reserve(n);
        for (int i = 0; i < n; ++i) {
          const double z = 1.0 - 2.0 * (i + 0.5) / n;
          const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
          const double phi = golden * i;
          Vec dir(3);
          dir << r * std::cos(phi), r * std::sin(phi), z;
          out.push_back({center_ + radius_ * dir, dir});
        }
        return out;
      }
      throw ValidationError("ball boundary sampling unsupported for d > 3");
    }
    case DomainKind::box: {
      if (dim_ == 1) {
        out.push_back({lo_, vec1(-1.0)});
        out.push_back({hi_, vec1(1.0)});
        return out;
      }
      if (dim_ == 2) {
        out.reserve(n);
        for (int i = 0; i < n; ++i)
          out.push_back(
              {boundary_point_at((i + 0.5) / n), Vec()});
        for (auto& bp : out) bp.normal = outward_normal(bp.point);
        return out;
      }
      throw ValidationError("box boundary sampling unsupported for d > 2");
    }
  }
  return out;
}

double Domain::boundary_parameter(const Vec& x) const {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::sublevel:
      // Left endpoint -> 0.25, right endpoint -> 0.75.
      return std::abs(x(0) - lo_(0)) < std::abs(x(0) - hi_(0)) ? 0.25 : 0.75;
    case DomainKind::ball: {
      if (dim_ == 1)
        return std::abs(x(0) - (center_(0) - radius_)) <
                       std::abs(x(0) - (center_(0) + radius_))
                   ? 0.25
                   : 0.75;
      if (dim_ == 2) {
        const double angle = std::atan2(x(1) - center_(1), x(0) - center_(0));
        double u = angle / (2.0 * M_PI);
        if (u < 0.0) u += 1.0;
        return u;
      }
      throw ValidationError("boundary parametrization unsupported for d > 2");
    }
    case DomainKind::box: {
      if (dim_ == 1)
        return std::abs(x(0) - lo_(0)) < std::abs(x(0) - hi_(0)) ? 0.25 : 0.75;
      if (dim_ != 2) throw ValidationError("boundary parametrization unsupported for d > 2");
      // Perimeter arclength, counterclockwise from (lo, lo).
      const double w = hi_(0) - lo_(0), h = hi_(1) - lo_(1);
      const double per = 2.0 * (w + h);
      // Project onto the nearest edge.
      const double dx_lo = std::abs(x(0) - lo_(0)), dx_hi = std::abs(x(0) - hi_(0));
      const double dy_lo = std::abs(x(1) - lo_(1)), dy_hi = std::abs(x(1) - hi_(1));
      const double m = std::min({dx_lo, dx_hi, dy_lo, dy_hi});
      double s = 0.0;
      if (m == dy_lo) s = std::clamp(x(0) - lo_(0), 0.0, w);
      else if (m == dx_hi) s = w + std::clamp(x(1) - lo_(1), 0.0, h);
      else if (m == dy_hi) s = w + h + std::clamp(hi_(0) - x(0), 0.0, w);
      else s = 2.0 * w + h + std::clamp(hi_(1) - x(1), 0.0, h);
      return s / per;
    }
  }
  return 0.0;
}

Vec Domain::boundary_point_at(double u) const {
  u -= std::floor(u);
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::sublevel:
      return u < 0.5 ? lo_ : hi_;
    case DomainKind::ball: {
      if (dim_ == 1) return u < 0.5 ? center_ - vec1(radius_) : center_ + vec1(radius_);
      if (dim_ == 2) {
        const double angle = 2.0 * M_PI * u;
        return center_ + radius_ * vec2(std::cos(angle), std::sin(angle));
      }
      throw ValidationError("boundary parametrization unsupported for d > 2");
    }
    case DomainKind::box: {
      if (dim_ == 1) return u < 0.5 ? lo_ : hi_;
      if (dim_ != 2) throw ValidationError("boundary parametrization unsupported for d > 2");
      const double w = hi_(0) - lo_(0), h = hi_(1) - lo_(1);
      double s = u * 2.0 * (w + h);
      if (s < w) return vec2(lo_(0) + s, lo_(1));
      s -= w;
      if (s < h) return vec2(hi_(0), lo_(1) + s);
      s -= h;
      if (s < w) return vec2(hi_(0) - s, hi_(1));
      s -= w;
      return vec2(lo_(0), hi_(1) - s);
    }
  }
  return Vec();
}

double Domain::lo1() const {
  if (dim_ != 1) throw ValidationError("lo1() requires a 1-d domain");
  if (kind_ == DomainKind::ball) return center_(0) - radius_;
  return lo_(0);
}

double Domain::hi1() const {
  if (dim_ != 1) throw ValidationError("hi1() requires a 1-d domain");
  if (kind_ == DomainKind::ball) return center_(0) + radius_;
  return hi_(0);
}

double boundary_crossing_fraction(const Domain& domain, const Vec& inside,
                                  const Vec& outside) {
  double lo = 0.0, hi = 1.0;
  // signed_distance(inside) < 0 <= signed_distance(outside)
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Vec x = inside + mid * (outside - inside);
    if (domain.signed_distance(x) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Central finite-difference Jacobian of the drift at x (autonomous field).
Eigen::MatrixXd fd_jacobian(const CoefficientField& field, const Vec& x, double h) {
  const int d = field.dim;
  Eigen::MatrixXd jac(d, d);
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    const Vec diff = (field.drift(0.0, xp) - field.drift(0.0, xm)) / (2.0 * h);
    for (int i = 0; i < d; ++i) jac(i, j) = diff(i);
  }
  return jac;
}

}  // namespace

AssumptionReport check_assumptions(const Domain& domain, const CoefficientField& field,
                                   const ProbeConfig& probe) {
  if (!field.autonomous)
    throw ValidationError("check_assumptions requires an autonomous field");
  AssumptionReport report;
  const Vec& a = domain.attractor();

  // A2: strict inward drift on the boundary.
  const auto boundary = domain.boundary_sample(probe.a2_boundary_samples);
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& bp : boundary)
    margin = std::min(margin, -field.drift(0.0, bp.point).dot(bp.normal));
  report.a2_min_inward_margin = margin;

  // A1: flow from boundary and interior probes converges into a small ball
  // around the attractor without leaving the (closure of the) domain.
  {
    IntegratorConfig flow_cfg;
    flow_cfg.dt = 1e-2;
    flow_cfg.horizon = probe.a1_horizon;
    flow_cfg.store_every = 10;
    std::vector<Vec> starts;
    const int nb = std::min<int>(probe.a1_boundary_probes,
                                 static_cast<int>(boundary.size()));
    for (int i = 0; i < nb; ++i) starts.push_back(boundary[i].point);
    // Interior probes between attractor and boundary samples.
    for (int i = 0; i < nb; ++i)
      starts.push_back(a + 0.5 * (boundary[i].point - a));
    bool converges = true;
    double worst = 0.0;
    for (const auto& x0 : starts) {
      bool stayed = true;
      double terminal = 0.0;
      try {
        const PathSample path = integrate_flow(field, x0, flow_cfg);
        for (const auto& x : path.states)
          if (domain.signed_distance(x) > 1e-7) stayed = false;
        terminal = (path.states.back() - a).norm();
      } catch (const DivergenceError&) {
        stayed = false;
        terminal = std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, terminal);
      if (!stayed || terminal > probe.a1_tolerance) converges = false;
    }
    report.a1_flow_converges = converges;
    report.a1_worst_terminal_distance = worst;
  }

  // A3: Jacobian spectrum at the attractor plus an estimate of the attraction
  // constant L over a sampled shell (reported, not asserted).
  {
    const Eigen::MatrixXd jac = fd_jacobian(field, a, probe.jacobian_fd_step);
    Eigen::EigenSolver<Eigen::MatrixXd> eig(jac);
    report.a3_jacobian_eigen_max = eig.eigenvalues().real().maxCoeff();

    RngStream probe_stream(probe.probe_seed, 0);
    double L = std::numeric_limits<double>::infinity();
    const double shell = 0.5 * std::abs(domain.signed_distance(a));
    for (int i = 0; i < 128; ++i) {
      Vec dir(domain.dim());
      for (int j = 0; j < domain.dim(); ++j) dir(j) = probe_stream.normal();
      if (dir.norm() == 0.0) continue;
      dir /= dir.norm();
      const double r = shell * (0.05 + 0.95 * probe_stream.uniform01());
      const Vec x = a + r * dir;
      L = std::min(L, -field.drift(0.0, x).dot(x - a) / (r * r));
    }
    report.a3_attraction_L = L;
  }

  // A4: singular values of sigma on boundary and interior samples.
  {
    double smin = std::numeric_limits<double>::infinity();
    double smax = 0.0;
    RngStream probe_stream(probe.probe_seed, 1);
    std::vector<Vec> points;
    for (const auto& bp : boundary) points.push_back(bp.point);
    points.push_back(a);
    for (int i = 0; i < probe.a4_samples; ++i) {
      const std::size_t pick = static_cast<std::size_t>(
          probe_stream.uniform01() * static_cast<double>(boundary.size()));
      const Vec& b = boundary[std::min(pick, boundary.size() - 1)].point;
      points.push_back(a + probe_stream.uniform01() * (b - a));
    }
    for (const auto& x : points) {
      const Eigen::MatrixXd sigma{field.diffusion(0.0, x)};
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sigma);
      smin = std::min(smin, svd.singularValues().minCoeff());
      smax = std::max(smax, svd.singularValues().maxCoeff());
    }
    report.a4_sigma_min = smin;
    report.a4_sigma_max = smax;
  }

  report.pass = report.a1_flow_converges && report.a2_min_inward_margin > 0.0 &&
                report.a3_jacobian_eigen_max < 0.0 && report.a4_sigma_min > 0.0;
  return report;
}

Domain enlarge(const Domain& domain, double rho, const CoefficientField& base_field) {
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  Domain candidate = domain;
  switch (domain.kind()) {
    case DomainKind::interval:
      candidate = Domain::interval(domain.lo1() - rho, domain.hi1() + rho,
                                   domain.attractor()(0));
      break;
    case DomainKind::box: {
      Vec lo = domain.box_lo(), hi = domain.box_hi();
      lo.array() -= rho;
      hi.array() += rho;
      candidate = Domain::box(lo, hi, domain.attractor());
      break;
    }
    case DomainKind::ball:
      candidate = Domain::ball(domain.ball_center(), domain.ball_radius() + rho,
                               domain.attractor());
      break;
    case DomainKind::sublevel: {
      // Raise the level until both component endpoints moved out by >= rho.
      const auto& V = domain.sublevel_potential();
      const double c0 = domain.sublevel_c();
      const double target_lo = domain.lo1() - rho;
      const double target_hi = domain.hi1() + rho;
      const auto endpoints_ok = [&](double c) {
        try {
          Domain trial = Domain::sublevel(V, c, domain.attractor()(0));
          return trial.lo1() <= target_lo && trial.hi1() >= target_hi;
        } catch (const ValidationError&) {
          return false;
        }
      };
      double c_hi = c0;
      double span = std::max(1e-3, 0.1 * std::abs(c0));
      bool found = false;
      for (int i = 0; i < 60; ++i) {
        c_hi = c0 + span;
        if (endpoints_ok(c_hi)) {
          found = true;
          break;
        }
        span *= 2.0;
      }
      if (!found)
        throw ValidationError("enlargement infeasible: level raise does not reach rho");
      double lo = c0, hi = c_hi;
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (endpoints_ok(mid))
          hi = mid;
        else
          lo = mid;
      }
      candidate = Domain::sublevel(V, hi, domain.attractor()(0));
      break;
    }
  }

  // The enlargement must itself satisfy A1, A2, A4 for the base field.
  const AssumptionReport report = check_assumptions(candidate, base_field);
  if (!report.a1_flow_converges) {
    std::ostringstream msg;
    msg << "enlargement infeasible: Assumption 1 fails (worst terminal distance "
        << report.a1_worst_terminal_distance << ")";
    throw ValidationError(msg.str());
  }
  if (!(report.a2_min_inward_margin > 0.0)) {
    // Name a witness point.
    const auto samples = candidate.boundary_sample(256);
    const BoundaryPoint* witness = nullptr;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& bp : samples) {
      const double m = -base_field.drift(0.0, bp.point).dot(bp.normal);
      if (m < worst) {
        worst = m;
        witness = &bp;
      }
    }
    std::ostringstream msg;
    msg << "enlargement infeasible: Assumption 2 fails at (";
    for (Eigen::Index i = 0; i < witness->point.size(); ++i) {
      if (i) msg << ", ";
      msg << witness->point(i);
    }
    msg << "), <b,n> = " << -worst;
    throw ValidationError(msg.str());
  }
  if (!(report.a4_sigma_min > 0.0))
    throw ValidationError("enlargement infeasible: Assumption 4 fails (singular diffusion)");
  return candidate;
}

ExitRecord first_exit_scan(const PathSample& path, const Domain& domain) {
  if (path.size() == 0) throw ValidationError("empty path");
  if (!domain.contains(path.states.front()))
    throw ValidationError("path starts outside the domain");
  ExitRecord record;
  record.seed_tag = path.seed_tag;
  record.status = ExitStatus::censored;
  record.tau = path.times.back();
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (domain.contains(path.states[k])) continue;
    const double s =
        boundary_crossing_fraction(domain, path.states[k - 1], path.states[k]);
    record.tau = path.times[k - 1] + s * (path.times[k] - path.times[k - 1]);
    record.exit_point = path.states[k - 1] + s * (path.states[k] - path.states[k - 1]);
    record.status = ExitStatus::exited;
    break;
  }
  return record;
}

HittingRecord hitting_time_tau_prime(const PathSample& path, const Domain& domain,
                                     double rho) {
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const Vec& a = domain.attractor();
  if (domain.signed_distance(a) > -rho)
    throw ValidationError("B_rho(a) is not contained in the domain");
  if (path.size() == 0) throw ValidationError("empty path");

  HittingRecord record;
  record.kind = HitKind::censored;
  record.time = path.times.back();
  record.point = path.states.back();

  const auto ball_dist = [&](const Vec& x) { return (x - a).norm() - rho; };
  if (ball_dist(path.states.front()) <= 0.0) {
    return {0.0, path.states.front(), HitKind::ball};
  }

  for (std::size_t k = 1; k < path.size(); ++k) {
    const Vec& x0 = path.states[k - 1];
    const Vec& x1 = path.states[k];
    const bool hits_ball = ball_dist(x1) <= 0.0;
    const bool leaves = !domain.contains(x1);
    if (!hits_ball && !leaves) continue;

    double s_ball = 2.0, s_bdry = 2.0;
    if (hits_ball) {
      double lo = 0.0, hi = 1.0;  // ball_dist(x0) > 0 >= ball_dist(x1)
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (ball_dist(x0 + mid * (x1 - x0)) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      s_ball = 0.5 * (lo + hi);
    }
    if (leaves) s_bdry = boundary_crossing_fraction(domain, x0, x1);

    const double s = std::min(s_ball, s_bdry);
    record.time = path.times[k - 1] + s * (path.times[k] - path.times[k - 1]);
    record.point = x0 + s * (x1 - x0);
    record.kind = s_ball <= s_bdry ? HitKind::ball : HitKind::boundary;
    return record;
  }
  return record;
}

}  // namespace fw
