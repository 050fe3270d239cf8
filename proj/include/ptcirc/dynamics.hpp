#pragma once

#include "ptcirc/model.hpp"
#include "ptcirc/smallmat.hpp"
#include "ptcirc/trace.hpp"

namespace ptcirc {

struct IntegratorConfig {
    double dt = 0.005;
    double t_end = 400.0;
    Vec4 psi0{1.0, 0.0, 0.0, 0.0};  // kick node 1, everything else quiet
};

// Classical RK4 on psi' = A psi.  Samples every step; if t_end is not a
// multiple of dt a single shortened step lands exactly on t_end (kept as the
// trace's terminal sample, off the uniform grid).  Throws OverflowError when
// any state component passes 1e300.
Trace rk4_integrate(const StateSpace& ss, const IntegratorConfig& cfg);

// matrix exponential by scaling and squaring: argument halved until its
// 1-norm is below 0.5, Taylor series summed to termwise 1-norm < 1e-18,
// result squared back up
Mat4 expm(const Mat4& m);

// exact propagator reference: psi_{i+1} = expm(A dt) psi_i on the same grid
// (same shortened last step) as rk4_integrate
Trace exact_propagate(const StateSpace& ss, const IntegratorConfig& cfg);

struct ConvergenceResult {
    double order;     // observed log2 error ratio between dt and dt/2
    double err_dt;    // max-norm error vs exact at step dt
    double err_half;  // same at dt/2
};

// measured RK4 convergence order against the exact propagator
ConvergenceResult convergence_order(const StateSpace& ss, const Vec4& psi0,
                                    double t_end, double dt);

}  // namespace ptcirc
