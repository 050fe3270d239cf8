#include "ptcirc/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ptcirc/errors.hpp"
#include "num_io.hpp"

namespace ptcirc {

namespace {

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw std::domain_error(std::string(name) +
                                " must be positive and finite, got " +
                                detail::num17(v));
}

void require_nonnegative(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
        throw std::domain_error(std::string(name) +
                                " must be nonnegative and finite, got " +
                                detail::num17(v));
}

}  // namespace

DimensionlessParams nondimensionalize(const PhysicalCircuit& pc) {
    require_positive(pc.inductance, "L");
    require_positive(pc.capacitance, "C");
    require_positive(pc.coupling_capacitance, "C0");
    require_positive(pc.resistance, "R");
    require_nonnegative(pc.inductor_resistance, "RL");

    const double z0 = std::sqrt(pc.inductance / pc.capacitance);
    DimensionlessParams p;
    p.c = pc.coupling_capacitance / pc.capacitance;
    p.gamma = z0 / pc.resistance;
    p.gamma_l = pc.inductor_resistance / z0;
    p.k = p.gamma * p.gamma_l;  // = RL/R
    p.omega0 = 1.0 / std::sqrt(pc.inductance * pc.capacitance);
    p.z0 = z0;
    return p;
}

DimensionlessParams from_dimensionless(double c, double gamma, double gamma_l) {
    require_positive(c, "c");
    require_nonnegative(gamma, "gamma");
    require_nonnegative(gamma_l, "gamma_l");
    DimensionlessParams p;
    p.c = c;
    p.gamma = gamma;
    p.gamma_l = gamma_l;
    p.k = gamma * gamma_l;
    p.omega0 = 1.0;
    p.z0 = 1.0;
    return p;
}

SecondOrderCoeffs second_order_coeffs(const DimensionlessParams& p) {
    const double c1 = 1.0 + p.c;
    SecondOrderCoeffs sc;
    sc.line1 = {(p.gamma - c1 * p.gamma_l) / c1, (p.k - 1.0) / c1,
                p.c / c1, p.c * p.gamma_l / c1};
    sc.line2 = {-(p.gamma + c1 * p.gamma_l) / c1, -(p.k + 1.0) / c1,
                p.c / c1, p.c * p.gamma_l / c1};
    return sc;
}

std::pair<Mat2, Mat2> eliminate_cross_accel(const SecondOrderCoeffs& sc) {
    const double d1 = sc.line1.dd_cross;
    const double d2 = sc.line2.dd_cross;
    const double det = 1.0 - d1 * d2;
    if (std::fabs(det) < 1e-14)
        throw NumericalError("cross-acceleration elimination is singular");

    // L ddV = P dV + Q V with L = [[1, -d1], [-d2, 1]]
    Mat2 pm{{{sc.line1.dv_self, sc.line1.dv_cross},
             {sc.line2.dv_cross, sc.line2.dv_self}}};
    Mat2 qm{{{sc.line1.v_self, 0.0}, {0.0, sc.line2.v_self}}};
    Mat2 linv{{{1.0 / det, d1 / det}, {d2 / det, 1.0 / det}}};
    return {linv * qm, linv * pm};
}

StateSpace build_state_space(const DimensionlessParams& p) {
    const double c = p.c, g = p.gamma, gl = p.gamma_l, k = p.k;
    const double den = 1.0 + 2.0 * c;

    StateSpace ss;
    ss.ma.m[0][0] = (1.0 + c) * (k - 1.0) / den;
    ss.ma.m[0][1] = -c * (k + 1.0) / den;
    ss.ma.m[1][0] = c * (k - 1.0) / den;
    ss.ma.m[1][1] = -(1.0 + c) * (k + 1.0) / den;

    ss.mb.m[0][0] = ((1.0 + c) * g - den * gl) / den;
    ss.mb.m[0][1] = -c * g / den;
    ss.mb.m[1][0] = c * g / den;
    ss.mb.m[1][1] = (-(1.0 + c) * g - den * gl) / den;

    for (int i = 0; i < 2; ++i) {
        ss.a.m[i][i + 2] = 1.0;
        for (int j = 0; j < 2; ++j) {
            ss.a.m[i + 2][j] = ss.ma.m[i][j];
            ss.a.m[i + 2][j + 2] = ss.mb.m[i][j];
        }
    }
    return ss;
}

namespace {

// second-order finite-difference time derivative of one column
std::vector<double> fd_derivative(const std::vector<double>& v, double dt) {
    const std::size_t n = v.size();
    std::vector<double> d(n);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dt);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
    return d;
}

}  // namespace

std::vector<CurrentBreakdown> reconstruct_currents(const DimensionlessParams& p,
                                                   const Trace& tr) {
    if (tr.channels < 4)
        throw std::domain_error("current reconstruction needs a full state trace");
    const std::size_t n = tr.size();
    if (n < 3)
        throw std::domain_error("current reconstruction needs at least 3 samples");
    if (!(tr.dt > 0.0))
        throw std::domain_error("trace has no positive sample spacing");

    std::vector<double> v1(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        v1[i] = tr.samples[i][0];
        v2[i] = tr.samples[i][1];
    }
    const auto dv1 = fd_derivative(v1, tr.dt);
    const auto dv2 = fd_derivative(v2, tr.dt);

    std::vector<CurrentBreakdown> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        CurrentBreakdown& b = out[i];
        b.i_r = {-p.gamma * v1[i], p.gamma * v2[i]};  // node 1 is the gain side
        b.i_c = {dv1[i], dv2[i]};
        b.i_c0 = {p.c * (dv1[i] - dv2[i]), p.c * (dv2[i] - dv1[i])};
    }

    // inductor branch: V = gamma_l i_L + di_L/dtau, trapezoidal update seeded
    // so the node law closes exactly at the first sample
    const double h = tr.dt;
    const double a = 1.0 - p.gamma_l * h / 2.0;
    const double bq = 1.0 + p.gamma_l * h / 2.0;
    for (int node = 0; node < 2; ++node) {
        const std::vector<double>& v = node == 0 ? v1 : v2;
        double il = -(out[0].i_r[node] + out[0].i_c[node] + out[0].i_c0[node]);
        out[0].i_l[node] = il;
        for (std::size_t i = 1; i < n; ++i) {
            il = (il * a + h / 2.0 * (v[i - 1] + v[i])) / bq;
            out[i].i_l[node] = il;
        }
    }
    return out;
}

std::vector<Vec2> kirchhoff_residual(const DimensionlessParams& p,
                                     const Trace& tr) {
    const auto cur = reconstruct_currents(p, tr);
    std::vector<Vec2> res(cur.size() >= 2 ? cur.size() - 2 : 0);
    for (std::size_t i = 1; i + 1 < cur.size(); ++i)
        for (int node = 0; node < 2; ++node)
            res[i - 1][node] = cur[i].i_r[node] + cur[i].i_c[node] +
                               cur[i].i_c0[node] + cur[i].i_l[node];
    return res;
}

namespace {

const std::map<std::string, int>& circuit_keys() {
    // 0 = physical family, 1 = dimensionless family
    static const std::map<std::string, int> keys = {
        {"L_henry", 0},  {"C_farad", 0}, {"C0_farad", 0}, {"R_ohm", 0},
        {"RL_ohm", 0},   {"c", 1},       {"gamma", 1},    {"gamma_l", 1},
    };
    return keys;
}

}  // namespace

CircuitSpec parse_circuit_file(std::istream& is, const std::string& name) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(name + ":" + std::to_string(lineno) +
                              ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (!circuit_keys().count(key))
            throw FormatError(name + ":" + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        double v;
        if (!detail::parse_double(val, v))
            throw FormatError(name + ":" + std::to_string(lineno) +
                              ": bad number '" + val + "' for key '" + key + "'");
        if (kv.count(key))
            throw FormatError(name + ":" + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        kv[key] = v;
    }

    bool has_phys = false, has_dim = false;
    for (const auto& [k, v] : kv)
        (circuit_keys().at(k) == 0 ? has_phys : has_dim) = true;
    if (has_phys && has_dim)
        throw FormatError(name + ": mixes physical (L_henry, ...) and "
                          "dimensionless (c, gamma, ...) keys");
    if (!has_phys && !has_dim)
        throw FormatError(name + ": no circuit parameters");

    CircuitSpec cs;
    if (has_phys) {
        for (const char* req : {"L_henry", "C_farad", "C0_farad", "R_ohm"})
            if (!kv.count(req))
                throw FormatError(name + ": missing key '" + std::string(req) + "'");
        cs.physical = PhysicalCircuit{kv["L_henry"], kv["C_farad"], kv["C0_farad"],
                                      kv["R_ohm"],
                                      kv.count("RL_ohm") ? kv["RL_ohm"] : 0.0};
    } else {
        for (const char* req : {"c", "gamma"})
            if (!kv.count(req))
                throw FormatError(name + ": missing key '" + std::string(req) + "'");
        cs.dimensionless = CircuitSpec::Dimensionless{
            kv["c"], kv["gamma"], kv.count("gamma_l") ? kv["gamma_l"] : 0.0};
    }
    return cs;
}

CircuitSpec load_circuit_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open circuit file '" + path + "'");
    return parse_circuit_file(f, path);
}

DimensionlessParams circuit_params(const CircuitSpec& cs) {
    try {
        if (cs.physical) return nondimensionalize(*cs.physical);
        if (cs.dimensionless)
            return from_dimensionless(cs.dimensionless->c, cs.dimensionless->gamma,
                                      cs.dimensionless->gamma_l);
    } catch (const std::domain_error& e) {
        throw FormatError(std::string("bad circuit value: ") + e.what());
    }
    throw FormatError("empty circuit spec");
}

}  // namespace ptcirc
