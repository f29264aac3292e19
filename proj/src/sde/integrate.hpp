#pragma once

#include <vector>

#include "core/types.hpp"
#include "geom/domain.hpp"
#include "sde/field.hpp"

namespace fw {

// Classical RK4 for the noiseless flow phi' = drift(t, phi). The diffusion
// part of the field is ignored.
PathSample integrate_flow(const CoefficientField& field, const Vec& x0,
                          const IntegratorConfig& cfg);

// n_steps i.i.d. N(0, dt Id) increments in R^d.
std::vector<Vec> brownian_increments(RngStream& stream, int d, double dt,
                                     std::int64_t n_steps);

// Euler-Maruyama: x_{k+1} = x_k + drift(t_k, x_k) dt + sqrt(eps) sigma(t_k, x_k) dW_k.
PathSample simulate_path(const CoefficientField& field, const Vec& x0, double eps,
                         const IntegratorConfig& cfg, RngStream& stream);

// Same recursion, stopping at the first grid point outside the domain. The
// crossing state is refined by linear interpolation between the last inside
// and first outside states; the censored flag is set when the horizon is
// reached while still inside.
ExitRecord simulate_until_exit(const CoefficientField& field, const Vec& x0,
                               double eps, const Domain& domain,
                               const IntegratorConfig& cfg, RngStream& stream);

}  // namespace fw
