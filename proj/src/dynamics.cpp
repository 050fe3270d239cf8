#include "ptcirc/dynamics.hpp"

#include <cmath>

#include "ptcirc/errors.hpp"
#include "num_io.hpp"

namespace ptcirc {

namespace {

constexpr double kOverflowLimit = 1e300;

void check_config(const IntegratorConfig& cfg) {
    if (!std::isfinite(cfg.dt) || cfg.dt <= 0.0)
        throw std::domain_error("dt must be positive, got " +
                                detail::num17(cfg.dt));
    if (!std::isfinite(cfg.t_end) || cfg.t_end <= 0.0)
        throw std::domain_error("t_end must be positive, got " +
                                detail::num17(cfg.t_end));
    for (double v : cfg.psi0)
        if (!std::isfinite(v))
            throw std::domain_error("psi0 must be finite");
}

bool blown(const Vec4& psi) {
    for (double v : psi)
        if (!(std::fabs(v) <= kOverflowLimit)) return true;
    return false;
}

// number of full steps plus an exact-landing remainder
std::pair<std::size_t, double> step_plan(double dt, double t_end) {
    auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    double rem = t_end - static_cast<double>(n) * dt;
    if (rem <= dt * 1e-9) rem = 0.0;
    return {n, rem};
}

Vec4 rk4_step(const StateSpace& ss, const Vec4& psi, double h) {
    const Vec4 k1 = ss.a * psi;
    const Vec4 k2 = ss.a * (psi + (h / 2.0) * k1);
    const Vec4 k3 = ss.a * (psi + (h / 2.0) * k2);
    const Vec4 k4 = ss.a * (psi + h * k3);
    return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trace rk4_integrate(const StateSpace& ss, const IntegratorConfig& cfg) {
    check_config(cfg);
    const auto [nfull, rem] = step_plan(cfg.dt, cfg.t_end);

    Trace tr;
    tr.dt = cfg.dt;
    tr.samples.reserve(nfull + 1);
    Vec4 psi = cfg.psi0;
    tr.samples.push_back(psi);
    for (std::size_t i = 1; i <= nfull; ++i) {
        psi = rk4_step(ss, psi, cfg.dt);
        if (blown(psi))
            throw OverflowError("state passed 1e300 during integration",
                                static_cast<double>(i) * cfg.dt);
        tr.samples.push_back(psi);
    }
    if (rem > 0.0) {
        psi = rk4_step(ss, psi, rem);
        if (blown(psi))
            throw OverflowError("state passed 1e300 during integration",
                                cfg.t_end);
        tr.terminal = {cfg.t_end, psi};
    }
    return tr;
}

Mat4 expm(const Mat4& m) {
    int s = 0;
    double nrm = m.norm1();
    while (nrm >= 0.5 && s < 64) {
        nrm /= 2.0;
        ++s;
    }
    const Mat4 b = std::ldexp(1.0, -s) * m;

    Mat4 sum = Mat4::identity();
    Mat4 term = Mat4::identity();
    for (int k = 1; k <= 40; ++k) {
        term = (1.0 / k) * (term * b);
        sum = sum + term;
        if (term.norm1() < 1e-18) break;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

Trace exact_propagate(const StateSpace& ss, const IntegratorConfig& cfg) {
    check_config(cfg);
    const auto [nfull, rem] = step_plan(cfg.dt, cfg.t_end);
    const Mat4 prop = expm(cfg.dt * ss.a);

    Trace tr;
    tr.dt = cfg.dt;
    tr.samples.reserve(nfull + 1);
    Vec4 psi = cfg.psi0;
    tr.samples.push_back(psi);
    for (std::size_t i = 1; i <= nfull; ++i) {
        psi = prop * psi;
        if (blown(psi))
            throw OverflowError("state passed 1e300 during propagation",
                                static_cast<double>(i) * cfg.dt);
        tr.samples.push_back(psi);
    }
    if (rem > 0.0) {
        psi = expm(rem * ss.a) * psi;
        if (blown(psi))
            throw OverflowError("state passed 1e300 during propagation",
                                cfg.t_end);
        tr.terminal = {cfg.t_end, psi};
    }
    return tr;
}

ConvergenceResult convergence_order(const StateSpace& ss, const Vec4& psi0,
                                    double t_end, double dt) {
    auto max_err = [&](double h) {
        IntegratorConfig cfg{h, t_end, psi0};
        const Trace num = rk4_integrate(ss, cfg);
        const Trace ref = exact_propagate(ss, cfg);
        double worst = 0.0;
        for (std::size_t i = 0; i < num.size(); ++i)
            for (int j = 0; j < 4; ++j)
                worst = std::max(worst, std::fabs(num.samples[i][j] -
                                                  ref.samples[i][j]));
        return worst;
    };

    ConvergenceResult r;
    r.err_dt = max_err(dt);
    r.err_half = max_err(dt / 2.0);
    r.order = std::log2(r.err_dt / r.err_half);
    return r;
}

}  // namespace ptcirc
