#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ptcirc/trace.hpp"

// Experiment-style mode estimation from a sampled voltage record: windowed
// DFT magnitude peaks for the mode frequencies, log-envelope fit through the
// oscillation extrema for the growth/decay rate.

namespace ptcirc {

enum class Regime {
    DecayingBeats,      // two resolved modes, net decay
    NearDegenerate,     // peaks unresolved or envelope fit unreliable
    GrowingSingleMode,  // one mode, positive rate
};

const char* to_string(Regime r);

struct Peak {
    double frequency;  // angular, dimensionless
    double amplitude;  // window-corrected magnitude
};

// Hann-windowed, zero-padded (8x next power of two) real DFT magnitude peaks.
// A bin counts as a peak when it beats both neighbours and 5% of the global
// maximum; each is refined by a three-point parabola on log magnitude.  At
// most max_peaks survive (largest amplitudes), returned frequency-descending.
// Needs at least 256 samples.
std::vector<Peak> dft_peaks(std::span<const double> v, double dt, int max_peaks);

struct EnvelopeFit {
    double rate;       // d ln(envelope) / dtau
    double r_squared;  // of the straight-line log fit
};

// Least-squares line through (tau, ln|v|) at the local maxima of |v|,
// discarding the first fifth of the extrema (transient).  Needs at least
// four extrema.
EnvelopeFit envelope_rate(std::span<const double> v, double dt, double t0 = 0.0);

struct SpectralEstimate {
    std::vector<double> frequencies;  // 1 or 2 mode frequencies, descending
    double rate;
    Regime regime;
    double r_squared;
    std::vector<double> amplitudes;  // matching frequencies
};

// Full pipeline on one trace channel (1 or 2).  Peaks closer than 3 pre-pad
// DFT bins or an envelope fit with r^2 < 0.9 classify as NEAR_DEGENERATE.
SpectralEstimate estimate_modes(const Trace& tr, int channel);

// key=value record: omega_r_1, omega_r_2 (if present), omega_i, regime,
// r_squared
void write_estimate(const SpectralEstimate& est, std::ostream& os);
void write_estimate(const SpectralEstimate& est, const std::string& path);

}  // namespace ptcirc
