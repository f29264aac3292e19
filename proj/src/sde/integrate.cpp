#include "sde/integrate.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace fw {

CoefficientField make_autonomous_field(int dim, std::function<Vec(const Vec&)> drift,
                                       std::function<Mat(const Vec&)> diffusion,
                                       std::optional<double> lipschitz) {
  CoefficientField field;
  field.dim = dim;
  field.drift = [fn = std::move(drift)](double, const Vec& x) { return fn(x); };
  field.diffusion = [fn = std::move(diffusion)](double, const Vec& x) { return fn(x); };
  field.autonomous = true;
  field.lipschitz_estimate = lipschitz;
  return field;
}

double check_autonomy(const CoefficientField& field, RngStream& stream, int n_probes,
                      double t_max, double x_range) {
  double worst = 0.0;
  for (int i = 0; i < n_probes; ++i) {
    const double t = t_max * stream.uniform01();
    Vec x(field.dim);
    for (int j = 0; j < field.dim; ++j) x(j) = x_range * (2.0 * stream.uniform01() - 1.0);
    worst = std::max(worst, (field.drift(t, x) - field.drift(0.0, x)).norm());
    worst = std::max(worst, operator_norm(field.diffusion(t, x) - field.diffusion(0.0, x)));
  }
  return worst;
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  if (dt > horizon) throw ValidationError("dt must not exceed horizon");
  if (store_every < 1) throw ValidationError("store_every must be >= 1");
}

std::int64_t IntegratorConfig::n_steps() const {
  return static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
}

bool state_ok(const Vec& x) {
  if (!x.allFinite()) return false;
  return x.cwiseAbs().maxCoeff() <= kDivergenceGuard;
}

namespace {

[[noreturn]] void throw_divergence(double t) {
  throw DivergenceError("trajectory diverged at t=" + std::to_string(t), t);
}

}  // namespace

PathSample integrate_flow(const CoefficientField& field, const Vec& x0,
                          const IntegratorConfig& cfg) {
  cfg.validate();
  const std::int64_t n = cfg.n_steps();
  PathSample out;
  out.times.reserve(static_cast<std::size_t>(n / cfg.store_every + 2));
  out.states.reserve(out.times.capacity());
  Vec x = x0;
  double t = 0.0;
  out.times.push_back(0.0);
  out.states.push_back(x);
  for (std::int64_t k = 0; k < n; ++k) {
    const double h = std::min(cfg.dt, cfg.horizon - t);
    const Vec k1 = field.drift(t, x);
    const Vec k2 = field.drift(t + 0.5 * h, x + (0.5 * h) * k1);
    const Vec k3 = field.drift(t + 0.5 * h, x + (0.5 * h) * k2);
    const Vec k4 = field.drift(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = (k + 1 == n) ? cfg.horizon : t + h;
    if (!state_ok(x)) throw_divergence(t);
    if ((k + 1) % cfg.store_every == 0 || k + 1 == n) {
      out.times.push_back(t);
      out.states.push_back(x);
    }
  }
  return out;
}

std::vector<Vec> brownian_increments(RngStream& stream, int d, double dt,
                                     std::int64_t n_steps) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (d < 1) throw ValidationError("dimension must be >= 1");
  if (n_steps < 0) throw ValidationError("n_steps must be >= 0");
  const double scale = std::sqrt(dt);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n_steps));
  for (std::int64_t k = 0; k < n_steps; ++k) {
    Vec dw(d);
    for (int j = 0; j < d; ++j) dw(j) = scale * stream.normal();
    out.push_back(std::move(dw));
  }
  return out;
}

namespace {

// Shared Euler-Maruyama stepper. on_step(k, t_old, t_new, x_old, x_new) may
// stop the integration by returning false.
template <typename OnStep>
void euler_maruyama_loop(const CoefficientField& field, const Vec& x0, double eps,
                         const IntegratorConfig& cfg, RngStream& stream,
                         OnStep&& on_step) {
  const std::int64_t n = cfg.n_steps();
  const double noise_scale = std::sqrt(eps);
  Vec x = x0;
  double t = 0.0;
  Vec dw(field.dim);
  for (std::int64_t k = 0; k < n; ++k) {
    const double h = std::min(cfg.dt, cfg.horizon - t);
    const double sqrt_h = std::sqrt(h);
    Vec x_new = x + h * field.drift(t, x);
    if (eps > 0.0) {
      for (int j = 0; j < field.dim; ++j) dw(j) = sqrt_h * stream.normal();
      x_new += noise_scale * (field.diffusion(t, x) * dw);
    }
    const double t_new = (k + 1 == n) ? cfg.horizon : t + h;
    if (!state_ok(x_new)) throw_divergence(t_new);
    if (!on_step(k, t, t_new, x, x_new)) return;
    x = std::move(x_new);
    t = t_new;
  }
}

}  // namespace

PathSample simulate_path(const CoefficientField& field, const Vec& x0, double eps,
                         const IntegratorConfig& cfg, RngStream& stream) {
  cfg.validate();
  if (eps < 0.0) throw ValidationError("eps must be nonnegative");
  PathSample out;
  out.seed_tag = {stream.master_seed(), stream.stream_id()};
  out.times.push_back(0.0);
  out.states.push_back(x0);
  const std::int64_t n = cfg.n_steps();
  euler_maruyama_loop(field, x0, eps, cfg, stream,
                      [&](std::int64_t k, double, double t_new, const Vec&, const Vec& x_new) {
                        if ((k + 1) % cfg.store_every == 0 || k + 1 == n) {
                          out.times.push_back(t_new);
                          out.states.push_back(x_new);
                        }
                        return true;
                      });
  return out;
}

ExitRecord simulate_until_exit(const CoefficientField& field, const Vec& x0, double eps,
                               const Domain& domain, const IntegratorConfig& cfg,
                               RngStream& stream) {
  cfg.validate();
  if (eps < 0.0) throw ValidationError("eps must be nonnegative");
  if (!domain.contains(x0)) throw ValidationError("starting point outside the domain");
  ExitRecord record;
  record.seed_tag = {stream.master_seed(), stream.stream_id()};
  record.status = ExitStatus::censored;
  record.tau = cfg.horizon;
  euler_maruyama_loop(field, x0, eps, cfg, stream,
                      [&](std::int64_t, double t_old, double t_new, const Vec& x_old,
                          const Vec& x_new) {
                        if (domain.contains(x_new)) return true;
                        const double s = boundary_crossing_fraction(domain, x_old, x_new);
                        record.tau = t_old + s * (t_new - t_old);
                        record.exit_point = x_old + s * (x_new - x_old);
                        record.status = ExitStatus::exited;
                        return false;
                      });
  return record;
}

}  // namespace fw
