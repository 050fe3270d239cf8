#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptcirc/dynamics.hpp"
#include "ptcirc/spectra.hpp"

// Parameter sweeps and derived quantities: branch-tracked spectra over gamma,
// avoided-crossing gap, EP location, growth threshold.  Per-point work is
// independent and runs OpenMP-parallel; a serial reference path produces
// bit-identical results.

namespace ptcirc {

enum class SweepSource {
    DirectEigen,  // eigs_general per grid point
    TimeDomain,   // rk4_integrate + estimate_modes per grid point
};

struct SweepOptions {
    IntegratorConfig integrator{};  // TimeDomain only
    bool parallel = true;
    // continuity flag threshold, in units of local-slope * grid spacing
    double slack = 10.0;
};

struct SweepResult {
    double c = 0.0;
    double gamma_l = 0.0;
    SweepSource source = SweepSource::DirectEigen;
    std::vector<double> grid;
    std::vector<Spectrum> spectra;              // branch-tracked across the grid
    std::vector<CoalescenceReport> coalescence;
    std::vector<unsigned char> point_ok;        // TimeDomain point failed -> 0
    std::vector<unsigned char> continuity_ok;   // branch jump suspected -> 0
};

std::vector<double> uniform_grid(double start, double stop, std::size_t count);

SweepResult sweep_gamma(double c, double gamma_l, std::span<const double> grid,
                        SweepSource source, const SweepOptions& opt = {});

// serial reference implementation; must agree bitwise with the parallel path
SweepResult sweep_gamma_serial(double c, double gamma_l,
                               std::span<const double> grid, SweepSource source,
                               const SweepOptions& opt = {});

// Minimizer of the positive-branch real gap.  DirectEigen sweeps with >= 3
// points only.  A roundoff-level coarse minimum (PT-broken interval, gap
// identically zero) resolves to the left interval edge by bisection on the
// imaginary split; otherwise golden-section refines around the coarse argmin.
// Returns (gamma_at_min, gap).
std::pair<double, double> min_real_gap(const SweepResult& sr);

// Zero-intercept fit gap_min = slope * gamma_l over a grid of positive
// gamma_l values (at least 4, increasing).  Returns (slope, rms_residual /
// mean_gap).
std::pair<double, double> gap_slope_vs_gamma_l(double c,
                                               std::span<const double> gamma_l_grid);

enum class EpMethod { Discriminant, GoldenSection };

struct EpSearchResult {
    double gamma_star;
    double min_gap;
    EpMethod method;
    int iterations;
};

// Exact discriminant root when gamma_l = 0, numeric gap minimization else
EpSearchResult locate_ep(double c, double gamma_l);

// smallest gamma where max Im(omega) crosses zero (net growth onset);
// requires gamma_l > 0, throws NumericalError if no crossing brackets
double growth_threshold(double c, double gamma_l);

// gamma,omega_r_1,omega_i_1,omega_r_2,omega_i_2,real_gap,overlap rows
void write_sweep_csv(const SweepResult& sr, std::ostream& os);
void write_sweep_csv(const SweepResult& sr, const std::string& path);

}  // namespace ptcirc
