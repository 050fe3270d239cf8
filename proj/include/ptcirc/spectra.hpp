#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "ptcirc/model.hpp"
#include "ptcirc/smallmat.hpp"

// Complex eigenfrequency spectra of the state space.  Frequencies omega
// relate to state-matrix eigenvalues mu by mu = -i*omega; time dependence is
// exp(-i*omega*tau), so Im(omega) < 0 decays and Im(omega) > 0 grows.

namespace ptcirc {

struct ModePair {
    Complex omega_plus;   // member with positive real part (larger Im on ties)
    Complex omega_minus;  // its -conj partner
    CVec4 vec_plus{};     // unit eigenvector of A for mu = -i*omega_plus
    bool paired = true;   // partner matched -conj(omega) within tolerance
};

struct Spectrum {
    std::array<Complex, 4> omega;     // unordered full set
    std::array<double, 4> residual;   // |p(mu_j)| of the monic quartic
    std::array<ModePair, 2> pairs;    // sorted by Re(omega_plus) descending
    bool pairing_ok = true;
    bool has_eigenvectors = false;
    bool degenerate = false;  // positive-branch pair coalesced (EP)
};

// coalescence diagnostics for the two positive-branch modes
struct CoalescenceReport {
    double overlap;     // |<v1,v2>| / (|v1||v2|), 1 at an EP
    double real_gap;    // |Re omega_1 - Re omega_2|
    double imag_split;  // |Im omega_1 - Im omega_2|
    bool defective;     // eigenvector extraction found a repeated direction
};

// characteristic polynomial of A, monic, coeffs[j] multiplies mu^j
// (coeffs[4] = 1); assembled from 2x2 traces and determinants, not from A
std::array<double, 5> char_poly_coeffs(const StateSpace& ss);

// closed-form lossless (gamma_l = 0) spectrum
Spectrum eigs_lossless_analytic(double c, double gamma);

// both roots (lower, upper) of the vanishing inner discriminant of the
// lossless dispersion relation; between them the pair is PT-broken
std::pair<double, double> ep_lossless(double c);

// general spectrum via simultaneous quartic root iteration + Newton polish;
// throws NumericalError if any monic residual stays above 1e-9
Spectrum eigs_general(const StateSpace& ss);

CoalescenceReport eigenvector_overlap(const Spectrum& sp);

// branch_id,omega_r,omega_i,residual rows, positive branches first
void write_spectrum_csv(const Spectrum& sp, std::ostream& os);
void write_spectrum_csv(const Spectrum& sp, const std::string& path);

}  // namespace ptcirc
