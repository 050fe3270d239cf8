#include "ptcirc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "ptcirc/errors.hpp"
#include "ptcirc/sigproc.hpp"
#include "num_io.hpp"

namespace ptcirc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Spectrum estimate_as_spectrum(const SpectralEstimate& est) {
    // shape the time-domain estimate like a direct spectrum so sweeps share
    // one record layout; only the positive branches carry information
    Spectrum sp;
    const Complex none(kNan, kNan);
    sp.pairs[0].omega_plus = Complex(est.frequencies[0], est.rate);
    sp.pairs[1].omega_plus = est.frequencies.size() > 1
                                 ? Complex(est.frequencies[1], est.rate)
                                 : none;
    for (auto& mp : sp.pairs) {
        mp.omega_minus = -std::conj(mp.omega_plus);
        mp.paired = true;
    }
    sp.omega = {sp.pairs[0].omega_plus, sp.pairs[0].omega_minus,
                sp.pairs[1].omega_plus, sp.pairs[1].omega_minus};
    sp.residual = {kNan, kNan, kNan, kNan};
    sp.has_eigenvectors = false;
    return sp;
}

void sweep_point(double c, double gamma_l, double gamma, SweepSource source,
                 const SweepOptions& opt, Spectrum& sp, CoalescenceReport& cr,
                 unsigned char& ok) {
    if (source == SweepSource::DirectEigen) {
        sp = eigs_general(build_state_space(from_dimensionless(c, gamma, gamma_l)));
        cr = eigenvector_overlap(sp);
        ok = 1;
        return;
    }
    try {
        IntegratorConfig cfg = opt.integrator;
        const StateSpace ss = build_state_space(from_dimensionless(c, gamma, gamma_l));
        const SpectralEstimate est = estimate_modes(rk4_integrate(ss, cfg), 1);
        sp = estimate_as_spectrum(est);
        const bool two = est.frequencies.size() > 1;
        cr.overlap = kNan;
        cr.real_gap = two ? est.frequencies[0] - est.frequencies[1] : kNan;
        cr.imag_split = 0.0;
        cr.defective = false;
        ok = 1;
    } catch (const std::exception&) {
        sp = Spectrum{};
        cr = CoalescenceReport{kNan, kNan, kNan, false};
        ok = 0;
    }
}

// keep branch identity continuous along the grid: swap the two positive
// branches wherever that shortens the step-to-step movement, then flag
// steps that jump more than `slack` times the locally expected movement
void track_branches(SweepResult& sr, double slack) {
    const std::size_t n = sr.grid.size();
    sr.continuity_ok.assign(n, 1);
    double slope_prev = -1.0;  // no estimate yet
    for (std::size_t i = 1; i < n; ++i) {
        if (!sr.point_ok[i] || !sr.point_ok[i - 1]) {
            slope_prev = -1.0;
            continue;
        }
        const Complex p0 = sr.spectra[i - 1].pairs[0].omega_plus;
        const Complex p1 = sr.spectra[i - 1].pairs[1].omega_plus;
        const Complex q0 = sr.spectra[i].pairs[0].omega_plus;
        const Complex q1 = sr.spectra[i].pairs[1].omega_plus;
        const double keep = std::abs(q0 - p0) + std::abs(q1 - p1);
        const double swap = std::abs(q0 - p1) + std::abs(q1 - p0);
        if (std::isfinite(keep) && std::isfinite(swap) && swap < keep)
            std::swap(sr.spectra[i].pairs[0], sr.spectra[i].pairs[1]);

        const double jump =
            std::max(std::abs(sr.spectra[i].pairs[0].omega_plus - p0),
                     std::abs(sr.spectra[i].pairs[1].omega_plus - p1));
        const double dg = std::fabs(sr.grid[i] - sr.grid[i - 1]);
        if (!std::isfinite(jump) || dg == 0.0) continue;
        if (slope_prev >= 0.0) {
            const double bound = slack * dg * std::max(slope_prev, 1e-3);
            if (jump > bound) sr.continuity_ok[i] = 0;
        }
        slope_prev = jump / dg;
    }
}

SweepResult sweep_impl(double c, double gamma_l, std::span<const double> grid,
                       SweepSource source, const SweepOptions& opt,
                       bool parallel) {
    for (double g : grid)
        if (!std::isfinite(g) || g < 0.0)
            throw std::domain_error("sweep grid values must be finite and >= 0");

    SweepResult sr;
    sr.c = c;
    sr.gamma_l = gamma_l;
    sr.source = source;
    sr.grid.assign(grid.begin(), grid.end());
    const std::size_t n = sr.grid.size();
    sr.spectra.resize(n);
    sr.coalescence.resize(n);
    sr.point_ok.assign(n, 0);
    sr.continuity_ok.assign(n, 1);

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            sweep_point(c, gamma_l, sr.grid[static_cast<std::size_t>(i)], source,
                        opt, sr.spectra[static_cast<std::size_t>(i)],
                        sr.coalescence[static_cast<std::size_t>(i)],
                        sr.point_ok[static_cast<std::size_t>(i)]);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            sweep_point(c, gamma_l, sr.grid[i], source, opt, sr.spectra[i],
                        sr.coalescence[i], sr.point_ok[i]);
    }

    // direct-eigen failures surface as exceptions, not flags
    if (source == SweepSource::DirectEigen)
        for (std::size_t i = 0; i < n; ++i)
            if (!sr.point_ok[i])
                throw NumericalError("eigensolve failed at gamma = " +
                                     detail::num17(sr.grid[i]));

    track_branches(sr, opt.slack);
    return sr;
}

}  // namespace

std::vector<double> uniform_grid(double start, double stop, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {start};
    std::vector<double> g(count);
    const double h = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = start + h * static_cast<double>(i);
    g[count - 1] = stop;
    return g;
}

SweepResult sweep_gamma(double c, double gamma_l, std::span<const double> grid,
                        SweepSource source, const SweepOptions& opt) {
    return sweep_impl(c, gamma_l, grid, source, opt, opt.parallel);
}

SweepResult sweep_gamma_serial(double c, double gamma_l,
                               std::span<const double> grid, SweepSource source,
                               const SweepOptions& opt) {
    return sweep_impl(c, gamma_l, grid, source, opt, false);
}

namespace {

double gap_at(double c, double gamma_l, double gamma) {
    const Spectrum sp =
        eigs_general(build_state_space(from_dimensionless(c, gamma, gamma_l)));
    return std::fabs(sp.pairs[0].omega_plus.real() -
                     sp.pairs[1].omega_plus.real());
}

double imag_split_at(double c, double gamma_l, double gamma) {
    const Spectrum sp =
        eigs_general(build_state_space(from_dimensionless(c, gamma, gamma_l)));
    double mx = 0.0;
    for (const auto& w : sp.omega) mx = std::max(mx, std::fabs(w.imag()));
    return mx;
}

template <class F>
double golden_min(F f, double a, double b, double tol, int& iterations) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    iterations = 0;
    while (b - a > tol && iterations < 200) {
        if (f1 > f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
        ++iterations;
    }
    return 0.5 * (a + b);
}

}  // namespace

std::pair<double, double> min_real_gap(const SweepResult& sr) {
    if (sr.source != SweepSource::DirectEigen)
        throw std::domain_error("gap minimization needs a direct-eigen sweep");
    if (sr.grid.size() < 3)
        throw std::domain_error("gap minimization needs at least 3 grid points");

    std::size_t imin = 0;
    for (std::size_t i = 1; i < sr.grid.size(); ++i)
        if (sr.coalescence[i].real_gap < sr.coalescence[imin].real_gap) imin = i;
    const double coarse = sr.coalescence[imin].real_gap;

    if (coarse < 1e-12) {
        // exactly-degenerate real parts: a PT-broken stretch; report its left
        // edge, found by bisecting on the onset of the imaginary split
        std::size_t left = imin;
        while (left > 0 && sr.coalescence[left - 1].real_gap < 1e-6) --left;
        if (left == 0) return {sr.grid[0], sr.coalescence[0].real_gap};
        double lo = sr.grid[left - 1], hi = sr.grid[left];
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            (imag_split_at(sr.c, sr.gamma_l, mid) > 1e-9 ? hi : lo) = mid;
        }
        return {0.5 * (lo + hi), coarse};
    }

    const std::size_t ia = imin > 0 ? imin - 1 : imin;
    const std::size_t ib = imin + 1 < sr.grid.size() ? imin + 1 : imin;
    int iters = 0;
    const double g = golden_min(
        [&](double x) { return gap_at(sr.c, sr.gamma_l, x); }, sr.grid[ia],
        sr.grid[ib], 1e-8, iters);
    return {g, gap_at(sr.c, sr.gamma_l, g)};
}

std::pair<double, double> gap_slope_vs_gamma_l(
    double c, std::span<const double> gamma_l_grid) {
    if (gamma_l_grid.size() < 4)
        throw std::domain_error("gap slope fit needs at least 4 gamma_l values");
    for (std::size_t i = 0; i < gamma_l_grid.size(); ++i) {
        if (!std::isfinite(gamma_l_grid[i]) || gamma_l_grid[i] <= 0.0)
            throw std::domain_error("gamma_l grid must be positive");
        if (i > 0 && gamma_l_grid[i] <= gamma_l_grid[i - 1])
            throw std::domain_error("gamma_l grid must be increasing");
    }

    const double gc = ep_lossless(c).first;
    const auto grid = uniform_grid(0.3 * gc, 3.0 * gc, 400);

    std::vector<double> gaps(gamma_l_grid.size());
    for (std::size_t i = 0; i < gamma_l_grid.size(); ++i) {
        const SweepResult sw = sweep_gamma(c, gamma_l_grid[i], grid,
                                           SweepSource::DirectEigen);
        gaps[i] = min_real_gap(sw).second;
    }

    double sxy = 0.0, sxx = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        sxy += gaps[i] * gamma_l_grid[i];
        sxx += gamma_l_grid[i] * gamma_l_grid[i];
        sum += gaps[i];
    }
    const double slope = sxy / sxx;

    double ss = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double r = gaps[i] - slope * gamma_l_grid[i];
        ss += r * r;
    }
    const double mean = sum / static_cast<double>(gaps.size());
    const double resid =
        mean > 0.0 ? std::sqrt(ss / static_cast<double>(gaps.size())) / mean : 0.0;
    return {slope, resid};
}

EpSearchResult locate_ep(double c, double gamma_l) {
    if (!std::isfinite(gamma_l) || gamma_l < 0.0)
        throw std::domain_error("gamma_l must be nonnegative");
    const double gc = ep_lossless(c).first;  // validates c

    EpSearchResult r;
    if (gamma_l == 0.0) {
        r.gamma_star = gc;
        // the broken interval has exactly degenerate real parts; probe inside
        r.min_gap = gap_at(c, 0.0, gc * (1.0 + 1e-6));
        r.method = EpMethod::Discriminant;
        r.iterations = 0;
        return r;
    }

    const auto grid = uniform_grid(0.3 * gc, 3.0 * gc, 400);
    std::size_t imin = 0;
    double best = 1e308;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double gap = gap_at(c, gamma_l, grid[i]);
        if (gap < best) {
            best = gap;
            imin = i;
        }
    }
    const std::size_t ia = imin > 0 ? imin - 1 : imin;
    const std::size_t ib = imin + 1 < grid.size() ? imin + 1 : imin;
    r.method = EpMethod::GoldenSection;
    r.gamma_star = golden_min([&](double x) { return gap_at(c, gamma_l, x); },
                              grid[ia], grid[ib], 1e-8, r.iterations);
    r.min_gap = gap_at(c, gamma_l, r.gamma_star);
    return r;
}

double growth_threshold(double c, double gamma_l) {
    if (!std::isfinite(gamma_l) || gamma_l <= 0.0)
        throw std::domain_error("growth threshold needs gamma_l > 0");
    const double gc = ep_lossless(c).first;

    auto max_imag = [&](double g) {
        const Spectrum sp =
            eigs_general(build_state_space(from_dimensionless(c, g, gamma_l)));
        double mx = -1e308;
        for (const auto& w : sp.omega) mx = std::max(mx, w.imag());
        return mx;
    };

    const auto scan = uniform_grid(0.5 * gc, 2.0 * gc, 200);
    double lo = kNan, hi = kNan;
    for (std::size_t i = 0; i + 1 < scan.size(); ++i) {
        if (max_imag(scan[i]) < 0.0 && max_imag(scan[i + 1]) >= 0.0) {
            lo = scan[i];
            hi = scan[i + 1];
            break;
        }
    }
    if (!std::isfinite(lo))
        throw NumericalError("no growth onset between gamma = " +
                             detail::num17(scan.front()) + " and " +
                             detail::num17(scan.back()));

    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (max_imag(mid) >= 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

void write_sweep_csv(const SweepResult& sr, std::ostream& os) {
    os << "gamma,omega_r_1,omega_i_1,omega_r_2,omega_i_2,real_gap,overlap\n";
    for (std::size_t i = 0; i < sr.grid.size(); ++i) {
        const auto& p0 = sr.spectra[i].pairs[0].omega_plus;
        const auto& p1 = sr.spectra[i].pairs[1].omega_plus;
        os << detail::num17(sr.grid[i]) << ',' << detail::num17(p0.real()) << ','
           << detail::num17(p0.imag()) << ',' << detail::num17(p1.real()) << ','
           << detail::num17(p1.imag()) << ','
           << detail::num17(sr.coalescence[i].real_gap) << ','
           << detail::num17(sr.coalescence[i].overlap) << '\n';
    }
}

void write_sweep_csv(const SweepResult& sr, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    write_sweep_csv(sr, f);
    if (!f) throw FormatError("write to '" + path + "' failed");
}

}  // namespace ptcirc
