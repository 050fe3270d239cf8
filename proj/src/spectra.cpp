#include "ptcirc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "ptcirc/errors.hpp"
#include "num_io.hpp"

namespace ptcirc {

std::array<double, 5> char_poly_coeffs(const StateSpace& ss) {
    // det(mu I - A) for the block companion form [[0, I], [Ma, Mb]] reduces to
    // det(mu^2 I - mu Mb - Ma); expand through 2x2 traces and determinants
    const double tra = ss.ma.trace();
    const double trb = ss.mb.trace();
    const double deta = ss.ma.det();
    const double detb = ss.mb.det();
    const double trab = (ss.ma * ss.mb).trace();
    return {deta, tra * trb - trab, detb - tra, -trb, 1.0};
}

namespace {

Complex horner(const std::array<double, 5>& a, Complex x) {
    Complex r = a[4];
    for (int j = 3; j >= 0; --j) r = r * x + a[j];
    return r;
}

Complex horner_deriv(const std::array<double, 5>& a, Complex x) {
    Complex r = 4.0 * a[4];
    for (int j = 3; j >= 1; --j) r = r * x + static_cast<double>(j) * a[j];
    return r;
}

// simultaneous (Durand-Kerner) iteration for all four roots, then a guarded
// Newton polish per root
std::array<Complex, 4> solve_quartic(const std::array<double, 5>& a) {
    std::array<Complex, 4> x;
    const Complex seed(0.4, 0.9);  // deliberately non-real, non-unit modulus
    x[0] = seed;
    for (int k = 1; k < 4; ++k) x[k] = x[k - 1] * seed;

    bool converged = false;
    for (int it = 0; it < 500 && !converged; ++it) {
        double maxstep = 0.0, maxabs = 0.0;
        for (int k = 0; k < 4; ++k) {
            Complex den = 1.0;
            for (int j = 0; j < 4; ++j)
                if (j != k) den *= x[k] - x[j];
            if (std::abs(den) < 1e-290) {
                x[k] += Complex(1e-8, 1e-8);
                maxstep = 1.0;
                continue;
            }
            const Complex step = horner(a, x[k]) / den;
            x[k] -= step;
            maxstep = std::max(maxstep, std::abs(step));
            maxabs = std::max(maxabs, std::abs(x[k]));
        }
        converged = maxstep < 1e-14 * (1.0 + maxabs);
    }

    for (int k = 0; k < 4; ++k) {
        for (int it = 0; it < 4; ++it) {
            const Complex fx = horner(a, x[k]);
            const Complex d = horner_deriv(a, x[k]);
            if (std::abs(d) == 0.0) break;
            const Complex cand = x[k] - fx / d;
            if (std::abs(horner(a, cand)) < std::abs(fx))
                x[k] = cand;
            else
                break;
        }
    }
    return x;
}

// null direction of A - mu I by full-pivot elimination; unit norm, largest
// component rotated onto the positive real axis
CVec4 null_vector(const Mat4& a, Complex mu) {
    Complex m[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m[i][j] = Complex(a.m[i][j]) - (i == j ? mu : Complex(0.0));

    int colp[4] = {0, 1, 2, 3};
    for (int s = 0; s < 3; ++s) {
        int pi = s, pj = s;
        double best = -1.0;
        for (int i = s; i < 4; ++i)
            for (int j = s; j < 4; ++j)
                if (std::abs(m[i][j]) > best) {
                    best = std::abs(m[i][j]);
                    pi = i;
                    pj = j;
                }
        for (int j = 0; j < 4; ++j) std::swap(m[s][j], m[pi][j]);
        for (int i = 0; i < 4; ++i) std::swap(m[i][s], m[i][pj]);
        std::swap(colp[s], colp[pj]);
        if (std::abs(m[s][s]) < 1e-300) break;
        for (int i = s + 1; i < 4; ++i) {
            const Complex f = m[i][s] / m[s][s];
            for (int j = s; j < 4; ++j) m[i][j] -= f * m[s][j];
        }
    }

    Complex y[4] = {0.0, 0.0, 0.0, 1.0};
    for (int s = 2; s >= 0; --s) {
        Complex acc = 0.0;
        for (int j = s + 1; j < 4; ++j) acc += m[s][j] * y[j];
        y[s] = std::abs(m[s][s]) < 1e-300 ? Complex(0.0) : -acc / m[s][s];
    }

    CVec4 x{};
    for (int j = 0; j < 4; ++j) x[colp[j]] = y[j];

    double nrm = 0.0;
    int imax = 0;
    double amax = -1.0;
    for (int i = 0; i < 4; ++i) {
        nrm += std::norm(x[i]);
        if (std::abs(x[i]) > amax) {
            amax = std::abs(x[i]);
            imax = i;
        }
    }
    nrm = std::sqrt(nrm);
    const Complex phase = amax > 0.0 ? std::conj(x[imax]) / amax : Complex(1.0);
    for (auto& xi : x) xi *= phase / nrm;
    return x;
}

// root-iteration fuzz at a double root is ~1e-8 (square root of evaluation
// noise), so the coalescence test sits well above that and well below any
// separation the sweeps resolve
constexpr double kPairTol = 1e-6;
constexpr double kResidualTol = 1e-9;
constexpr double kCoalesceTol = 1e-6;

// pick omega with Re > 0 (larger Im on ties) as the positive member
bool plus_before(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

// residuals, -conj pairing, eigenvectors, flags; shared by both spectrum paths
Spectrum finalize_spectrum(const StateSpace& ss,
                           const std::array<Complex, 4>& omega) {
    const auto coeffs = char_poly_coeffs(ss);
    Spectrum sp;
    sp.omega = omega;
    double worst = 0.0;
    for (int j = 0; j < 4; ++j) {
        sp.residual[j] = std::abs(horner(coeffs, Complex(0.0, -1.0) * omega[j]));
        worst = std::max(worst, sp.residual[j]);
    }
    if (worst > kResidualTol)
        throw NumericalError("eigenvalue residual " + detail::num17(worst) +
                             " above tolerance");

    // three ways to split four frequencies into two pairs; the physical
    // pairing omega <-> -conj(omega) is the one with the smallest worst-case
    // mismatch
    static const int part[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    double scale = 1.0;
    for (const auto& w : omega) scale = std::max(scale, std::abs(w));
    int bestp = 0;
    double bestcost = 1e308;
    for (int pi = 0; pi < 3; ++pi) {
        double cost = 0.0;
        for (int h = 0; h < 2; ++h) {
            const Complex wa = omega[part[pi][2 * h]];
            const Complex wb = omega[part[pi][2 * h + 1]];
            cost = std::max(cost, std::abs(wa + std::conj(wb)));
        }
        if (cost < bestcost) {
            bestcost = cost;
            bestp = pi;
        }
    }
    sp.pairing_ok = bestcost <= kPairTol * scale;

    for (int h = 0; h < 2; ++h) {
        const Complex wa = omega[part[bestp][2 * h]];
        const Complex wb = omega[part[bestp][2 * h + 1]];
        ModePair& mp = sp.pairs[h];
        mp.paired = std::abs(wa + std::conj(wb)) <= kPairTol * scale;
        if (plus_before(wa, wb)) {
            mp.omega_plus = wa;
            mp.omega_minus = wb;
        } else {
            mp.omega_plus = wb;
            mp.omega_minus = wa;
        }
    }
    if (!plus_before(sp.pairs[0].omega_plus, sp.pairs[1].omega_plus))
        std::swap(sp.pairs[0], sp.pairs[1]);

    const Complex mu0 = Complex(0.0, -1.0) * sp.pairs[0].omega_plus;
    const Complex mu1 = Complex(0.0, -1.0) * sp.pairs[1].omega_plus;
    sp.degenerate = std::abs(mu0 - mu1) < kCoalesceTol * scale;
    sp.pairs[0].vec_plus = null_vector(ss.a, mu0);
    sp.pairs[1].vec_plus =
        sp.degenerate ? sp.pairs[0].vec_plus : null_vector(ss.a, mu1);
    sp.has_eigenvectors = true;
    return sp;
}

}  // namespace

Spectrum eigs_lossless_analytic(double c, double gamma) {
    const DimensionlessParams p = from_dimensionless(c, gamma, 0.0);
    const double den = 2.0 * (1.0 + 2.0 * c);
    const double t = 2.0 * (1.0 + c) - gamma * gamma;
    const Complex inner = std::sqrt(Complex(t * t - 4.0 * (1.0 + 2.0 * c)));
    const Complex w1 = std::sqrt((t + inner) / den);
    const Complex w3 = std::sqrt((t - inner) / den);
    return finalize_spectrum(build_state_space(p), {w1, -w1, w3, -w3});
}

std::pair<double, double> ep_lossless(double c) {
    if (!std::isfinite(c) || c <= 0.0)
        throw std::domain_error("c must be positive, got " + detail::num17(c));
    // sqrt(2(1+c) - 2 sqrt(1+2c)) collapses to sqrt(1+2c) - 1 exactly
    const double s = std::sqrt(1.0 + 2.0 * c);
    return {s - 1.0, std::sqrt(2.0 * (1.0 + c) + 2.0 * s)};
}

Spectrum eigs_general(const StateSpace& ss) {
    const auto mu = solve_quartic(char_poly_coeffs(ss));
    std::array<Complex, 4> omega;
    for (int j = 0; j < 4; ++j) omega[j] = Complex(0.0, 1.0) * mu[j];
    return finalize_spectrum(ss, omega);
}

CoalescenceReport eigenvector_overlap(const Spectrum& sp) {
    if (!sp.has_eigenvectors)
        throw std::domain_error("spectrum carries no eigenvectors");
    const CVec4& v1 = sp.pairs[0].vec_plus;
    const CVec4& v2 = sp.pairs[1].vec_plus;
    Complex dot = 0.0;
    double n1 = 0.0, n2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        dot += std::conj(v1[i]) * v2[i];
        n1 += std::norm(v1[i]);
        n2 += std::norm(v2[i]);
    }
    CoalescenceReport cr;
    cr.overlap = std::abs(dot) / std::sqrt(n1 * n2);
    cr.real_gap = std::fabs(sp.pairs[0].omega_plus.real() -
                            sp.pairs[1].omega_plus.real());
    cr.imag_split = std::fabs(sp.pairs[0].omega_plus.imag() -
                              sp.pairs[1].omega_plus.imag());
    cr.defective = sp.degenerate;
    return cr;
}

void write_spectrum_csv(const Spectrum& sp, std::ostream& os) {
    os << "branch_id,omega_r,omega_i,residual\n";
    const Complex w[4] = {sp.pairs[0].omega_plus, sp.pairs[1].omega_plus,
                          sp.pairs[0].omega_minus, sp.pairs[1].omega_minus};
    for (int b = 0; b < 4; ++b) {
        // residual entry belongs to the matching member of the unordered set
        double res = sp.residual[0];
        double bestd = 1e308;
        for (int j = 0; j < 4; ++j) {
            const double d = std::abs(sp.omega[j] - w[b]);
            if (d < bestd) {
                bestd = d;
                res = sp.residual[j];
            }
        }
        os << b + 1 << ',' << detail::num17(w[b].real()) << ','
           << detail::num17(w[b].imag()) << ',' << detail::num17(res) << '\n';
    }
}

void write_spectrum_csv(const Spectrum& sp, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    write_spectrum_csv(sp, f);
    if (!f) throw FormatError("write to '" + path + "' failed");
}

}  // namespace ptcirc
