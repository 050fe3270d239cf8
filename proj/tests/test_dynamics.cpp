#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "ptcirc/dynamics.hpp"
#include "ptcirc/errors.hpp"
#include "ptcirc/model.hpp"

using namespace ptcirc;

namespace {

const double kC = 0.33473;

// independent dense route: psi(t) = V exp(diag(mu) t) V^-1 psi0
Vec4 eigen_propagate(const StateSpace& ss, const Vec4& psi0, double t) {
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = ss.a.m[i][j];
    const Eigen::EigenSolver<Eigen::Matrix4d> es(m);
    const Eigen::Vector4cd coef =
        es.eigenvectors().colPivHouseholderQr().solve(
            Eigen::Vector4d(psi0[0], psi0[1], psi0[2], psi0[3]).cast<std::complex<double>>());
    Eigen::Vector4cd out = Eigen::Vector4cd::Zero();
    for (int j = 0; j < 4; ++j)
        out += coef(j) * std::exp(es.eigenvalues()(j) * t) *
               es.eigenvectors().col(j);
    return {out(0).real(), out(1).real(), out(2).real(), out(3).real()};
}

}  // namespace

TEST_CASE("expm of the zero matrix is the identity") {
    const Mat4 e = expm(Mat4{});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(e.m[i][j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("expm reproduces a block rotation") {
    // Ma = -I, Mb = 0: exp(tA) = [[cos t I, sin t I], [-sin t I, cos t I]]
    StateSpace ss;
    ss.ma.m[0][0] = ss.ma.m[1][1] = -1.0;
    for (int i = 0; i < 2; ++i) {
        ss.a.m[i][i + 2] = 1.0;
        ss.a.m[i + 2][i] = -1.0;
    }
    const double t = 0.3;
    const Mat4 e = expm(t * ss.a);
    for (int i = 0; i < 2; ++i) {
        CHECK(e.m[i][i] == doctest::Approx(std::cos(t)).epsilon(1e-15));
        CHECK(e.m[i][i + 2] == doctest::Approx(std::sin(t)).epsilon(1e-15));
        CHECK(e.m[i + 2][i] == doctest::Approx(-std::sin(t)).epsilon(1e-15));
        CHECK(e.m[i + 2][i + 2] == doctest::Approx(std::cos(t)).epsilon(1e-15));
    }
    CHECK(e.m[0][1] == 0.0);
}

TEST_CASE("expm semigroup property") {
    const StateSpace ss =
        build_state_space(from_dimensionless(kC, 0.2545, 0.0738));
    const Mat4 half = expm(0.2 * ss.a);
    const Mat4 whole = expm(0.4 * ss.a);
    const Mat4 sq = half * half;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(sq.m[i][j] == doctest::Approx(whole.m[i][j]).epsilon(1e-13));
}

TEST_CASE("exact propagation matches the dense eigendecomposition") {
    const StateSpace ss =
        build_state_space(from_dimensionless(kC, 0.2545, 0.0738));
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 50.0;
    const Trace tr = exact_propagate(ss, cfg);

    const Vec4 ref = eigen_propagate(ss, cfg.psi0, 50.0);
    const Vec4& got = tr.samples.back();
    for (int j = 0; j < 4; ++j)
        CHECK(got[j] == doctest::Approx(ref[j]).epsilon(1e-9));
}

TEST_CASE("rk4 converges at fourth order") {
    const StateSpace ss =
        build_state_space(from_dimensionless(kC, 0.2545, 0.0738));
    const ConvergenceResult r =
        convergence_order(ss, {1.0, 0.0, 0.0, 0.0}, 10.0, 0.01);
    CHECK(r.order > 3.7);
    CHECK(r.order < 4.3);
    CHECK(r.err_dt < 1e-8);
    CHECK(r.err_half < r.err_dt);
}

TEST_CASE("rk4 stays near the exact propagator over the full horizon") {
    const StateSpace ss =
        build_state_space(from_dimensionless(kC, 0.0815, 0.0738));
    IntegratorConfig cfg;  // defaults: dt 0.005, t_end 400
    const Trace num = rk4_integrate(ss, cfg);
    const Trace ref = exact_propagate(ss, cfg);
    REQUIRE(num.size() == ref.size());

    double worst = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i)
        for (int j = 0; j < 4; ++j)
            worst = std::max(worst,
                             std::fabs(num.samples[i][j] - ref.samples[i][j]));
    CHECK(worst < 1e-7);
}

TEST_CASE("sampling grid and exact landing") {
    const StateSpace ss = build_state_space(from_dimensionless(kC, 0.1, 0.0));
    IntegratorConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 1.2345;
    const Trace tr = rk4_integrate(ss, cfg);

    CHECK(tr.t0 == 0.0);
    CHECK(tr.dt == 0.1);
    CHECK(tr.size() == 13);  // 0 .. 1.2 on the uniform grid
    REQUIRE(tr.terminal.has_value());
    CHECK(tr.terminal->first == 1.2345);
    CHECK(tr.end_time() == 1.2345);

    // a multiple of dt needs no terminal sample
    cfg.t_end = 1.2;
    const Trace even = rk4_integrate(ss, cfg);
    CHECK(even.size() == 13);
    CHECK_FALSE(even.terminal.has_value());
    CHECK(even.end_time() == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("terminal sample agrees between integrator and propagator") {
    const StateSpace ss =
        build_state_space(from_dimensionless(kC, 0.2545, 0.0738));
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 7.333;
    const Trace ex = exact_propagate(ss, cfg);
    REQUIRE(ex.terminal.has_value());

    const Mat4 direct = expm(7.333 * ss.a);
    const Vec4 ref = direct * cfg.psi0;
    for (int j = 0; j < 4; ++j)
        CHECK(ex.terminal->second[j] == doctest::Approx(ref[j]).epsilon(1e-11));

    // at dt = 0.05 the truncation error sits around 1e-5 relative
    const Trace num = rk4_integrate(ss, cfg);
    REQUIRE(num.terminal.has_value());
    for (int j = 0; j < 4; ++j)
        CHECK(num.terminal->second[j] ==
              doctest::Approx(ex.terminal->second[j]).epsilon(1e-4));
}

TEST_CASE("integration is linear in the initial state") {
    const StateSpace ss =
        build_state_space(from_dimensionless(kC, 0.3133, 0.0738));
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    const Trace base = rk4_integrate(ss, cfg);

    // doubling scales every floating point operation exactly
    IntegratorConfig doubled = cfg;
    doubled.psi0 = {2.0, 0.0, 0.0, 0.0};
    const Trace twice = rk4_integrate(ss, doubled);
    for (std::size_t i = 0; i < base.size(); i += 37)
        for (int j = 0; j < 4; ++j)
            CHECK(twice.samples[i][j] == 2.0 * base.samples[i][j]);

    // general superposition holds to rounding
    IntegratorConfig mixed = cfg;
    mixed.psi0 = {0.0, 1.0, 0.0, 0.0};
    const Trace other = rk4_integrate(ss, mixed);
    IntegratorConfig both = cfg;
    both.psi0 = {1.0, 1.0, 0.0, 0.0};
    const Trace sum = rk4_integrate(ss, both);
    for (std::size_t i = 0; i < base.size(); i += 37)
        for (int j = 0; j < 4; ++j)
            CHECK(sum.samples[i][j] ==
                  doctest::Approx(base.samples[i][j] + other.samples[i][j])
                      .epsilon(1e-11));
}

TEST_CASE("runaway growth raises an overflow error") {
    // deep in the broken phase with a huge kick there is real growth
    const StateSpace ss = build_state_space(from_dimensionless(kC, 1.0, 0.0));
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 400.0;
    cfg.psi0 = {1e290, 0.0, 0.0, 0.0};

    CHECK_THROWS_AS(rk4_integrate(ss, cfg), OverflowError);
    CHECK_THROWS_AS(exact_propagate(ss, cfg), OverflowError);
    try {
        rk4_integrate(ss, cfg);
    } catch (const OverflowError& e) {
        CHECK(e.time_reached > 0.0);
        CHECK(e.time_reached <= cfg.t_end);
    }
}

TEST_CASE("integrator config validation") {
    const StateSpace ss = build_state_space(from_dimensionless(kC, 0.1, 0.0));
    IntegratorConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(rk4_integrate(ss, cfg), std::domain_error);
    cfg.dt = -0.1;
    CHECK_THROWS_AS(rk4_integrate(ss, cfg), std::domain_error);
    cfg = {};
    cfg.t_end = 0.0;
    CHECK_THROWS_AS(rk4_integrate(ss, cfg), std::domain_error);
    cfg = {};
    cfg.psi0[2] = std::nan("");
    CHECK_THROWS_AS(exact_propagate(ss, cfg), std::domain_error);
}
