#pragma once

// Reference computations that do not use the spectral closed forms: direct
// integration of the Jacobi equation and finite differences of loop transports.

#include "aniso/symspace.hpp"

namespace aniso {

/// Y(s) for Y'' + R(Y, c')c' = 0 along c(t) = exp_x(t w), integrated with classical RK4
/// in a parallel frame whose curvature matrix is re-evaluated at every stage.
Vec jacobi_rk4(const AmbientModel& model, const Vec& x, const Vec& w, const Vec& y0,
               const Vec& y0prime, double s, double step = 1e-3);

/// d/ds of the loop transport p0 -> p -> exp_p(s v) -> p0 applied to w, at s = 0.
/// Central differences at h and 2h combined by Richardson extrapolation.
Vec loop_holonomy_derivative(const AmbientModel& model, const Vec& p, const Vec& v, const Vec& w,
                             double h = 1e-3);

}  // namespace aniso
