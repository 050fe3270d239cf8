#include "ptcirc/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>

#include <fftw3.h>

#include "ptcirc/errors.hpp"
#include "num_io.hpp"

namespace ptcirc {

const char* to_string(Regime r) {
    switch (r) {
        case Regime::DecayingBeats: return "DECAYING_BEATS";
        case Regime::NearDegenerate: return "NEAR_DEGENERATE";
        case Regime::GrowingSingleMode: return "GROWING_SINGLE_MODE";
    }
    return "?";
}

namespace {

// the FFTW planner mutates global state; executing a plan is thread safe,
// making or destroying one is not
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

constexpr double kNoiseFloorFrac = 0.05;
constexpr std::size_t kMinSamples = 256;

}  // namespace

std::vector<Peak> dft_peaks(std::span<const double> v, double dt,
                            int max_peaks) {
    if (v.size() < kMinSamples)
        throw std::domain_error("need at least 256 samples, got " +
                                std::to_string(v.size()));
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::domain_error("dt must be positive");
    if (max_peaks < 1) throw std::domain_error("max_peaks must be >= 1");
    for (double x : v)
        if (!std::isfinite(x)) throw NumericalError("non-finite sample in record");

    const std::size_t n = v.size();
    const std::size_t nfft = 8 * next_pow2(n);
    const double pi = std::numbers::pi;

    double* in = fftw_alloc_real(nfft);
    fftw_complex* out = fftw_alloc_complex(nfft / 2 + 1);
    std::fill(in, in + nfft, 0.0);

    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w =
            0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) /
                                 static_cast<double>(n - 1));
        in[i] = v[i] * w;
        wsum += w;
    }

    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in, out,
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    const std::size_t nbins = nfft / 2 + 1;
    std::vector<double> mag(nbins);
    for (std::size_t k = 0; k < nbins; ++k)
        mag[k] = std::hypot(out[k][0], out[k][1]);
    fftw_free(in);
    fftw_free(out);

    const double floor = kNoiseFloorFrac * *std::max_element(mag.begin(), mag.end());

    std::vector<Peak> found;
    for (std::size_t k = 1; k + 1 < nbins; ++k) {
        if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1] && mag[k] > floor))
            continue;
        // refine on log magnitude; all three bins sit above the floor > 0
        const double lm = std::log(mag[k - 1]);
        const double l0 = std::log(mag[k]);
        const double lp = std::log(mag[k + 1]);
        const double dd = lm - 2.0 * l0 + lp;
        const double delta = dd == 0.0 ? 0.0 : 0.5 * (lm - lp) / dd;
        found.push_back({2.0 * pi * (static_cast<double>(k) + delta) /
                             (static_cast<double>(nfft) * dt),
                         2.0 * mag[k] / wsum});
    }

    std::sort(found.begin(), found.end(),
              [](const Peak& a, const Peak& b) { return a.amplitude > b.amplitude; });
    if (found.size() > static_cast<std::size_t>(max_peaks))
        found.resize(static_cast<std::size_t>(max_peaks));
    std::sort(found.begin(), found.end(),
              [](const Peak& a, const Peak& b) { return a.frequency > b.frequency; });
    return found;
}

EnvelopeFit envelope_rate(std::span<const double> v, double dt, double t0) {
    if (v.size() < 3) throw std::domain_error("record too short for envelope fit");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::domain_error("dt must be positive");
    for (double x : v)
        if (!std::isfinite(x)) throw NumericalError("non-finite sample in record");

    std::vector<double> te, ae;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double a = std::fabs(v[i]);
        if (a >= std::fabs(v[i - 1]) && a >= std::fabs(v[i + 1]) && a > 0.0) {
            te.push_back(t0 + dt * static_cast<double>(i));
            ae.push_back(a);
        }
    }
    if (te.size() < 4)
        throw std::domain_error("fewer than 4 envelope extrema (" +
                                std::to_string(te.size()) + ")");

    const std::size_t skip = te.size() / 5;  // settle-in transient
    const std::size_t m = te.size() - skip;

    double sx = 0.0, sy = 0.0;
    for (std::size_t i = skip; i < te.size(); ++i) {
        sx += te[i];
        sy += std::log(ae[i]);
    }
    const double mx = sx / static_cast<double>(m);
    const double my = sy / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = skip; i < te.size(); ++i) {
        const double dx = te[i] - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(ae[i]) - my);
    }
    if (sxx == 0.0) throw std::domain_error("degenerate extrema spacing");

    EnvelopeFit fit;
    fit.rate = sxy / sxx;
    double ssres = 0.0, sstot = 0.0;
    for (std::size_t i = skip; i < te.size(); ++i) {
        const double y = std::log(ae[i]);
        const double pred = my + fit.rate * (te[i] - mx);
        ssres += (y - pred) * (y - pred);
        sstot += (y - my) * (y - my);
    }
    fit.r_squared = sstot == 0.0 ? 1.0 : 1.0 - ssres / sstot;
    return fit;
}

SpectralEstimate estimate_modes(const Trace& tr, int channel) {
    if (channel != 1 && channel != 2)
        throw std::domain_error("channel must be 1 or 2, got " +
                                std::to_string(channel));
    if (channel == 2 && tr.channels < 2)
        throw std::domain_error("trace has a single channel, channel 2 unavailable");
    if (tr.size() < kMinSamples)
        throw std::domain_error("need at least 256 samples, got " +
                                std::to_string(tr.size()));

    std::vector<double> v(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) v[i] = tr.samples[i][channel - 1];

    const auto peaks = dft_peaks(v, tr.dt, 2);
    if (peaks.empty())
        throw NumericalError("no spectral peak above the noise floor");
    const auto env = envelope_rate(v, tr.dt, tr.t0);

    SpectralEstimate est;
    for (const auto& p : peaks) {
        est.frequencies.push_back(p.frequency);
        est.amplitudes.push_back(p.amplitude);
    }
    est.rate = env.rate;
    est.r_squared = env.r_squared;

    // pre-pad DFT resolution decides whether two peaks count as resolved
    const double bin = 2.0 * std::numbers::pi /
                       (static_cast<double>(tr.size()) * tr.dt);
    const bool two = peaks.size() == 2;
    const bool unresolved =
        two && std::fabs(peaks[0].frequency - peaks[1].frequency) < 3.0 * bin;

    if (unresolved)
        est.regime = Regime::NearDegenerate;
    else if (env.r_squared < 0.9)
        est.regime = Regime::NearDegenerate;
    else if (!two && env.rate > 0.0)
        est.regime = Regime::GrowingSingleMode;
    else if (two && env.rate < 0.0)
        est.regime = Regime::DecayingBeats;
    else
        est.regime = Regime::NearDegenerate;
    return est;
}

void write_estimate(const SpectralEstimate& est, std::ostream& os) {
    os << "omega_r_1=" << detail::num17(est.frequencies[0]) << '\n';
    if (est.frequencies.size() > 1)
        os << "omega_r_2=" << detail::num17(est.frequencies[1]) << '\n';
    os << "omega_i=" << detail::num17(est.rate) << '\n';
    os << "regime=" << to_string(est.regime) << '\n';
    os << "r_squared=" << detail::num17(est.r_squared) << '\n';
}

void write_estimate(const SpectralEstimate& est, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    write_estimate(est, f);
    if (!f) throw FormatError("write to '" + path + "' failed");
}

}  // namespace ptcirc
