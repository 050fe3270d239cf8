#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptcirc/smallmat.hpp"
#include "ptcirc/trace.hpp"

// Circuit description of the capacitively coupled gain/loss RLC pair and the
// reductions down to the 4x4 first-order state space.  Node 1 carries the
// gain element (-R), node 2 the matched loss (+R); both tank inductors carry
// the same series resistance R_L.

namespace ptcirc {

// component values in SI units
struct PhysicalCircuit {
    double inductance;              // L, henry
    double capacitance;             // C, farad
    double coupling_capacitance;    // C0, farad
    double resistance;              // R, ohm (gain/loss magnitude)
    double inductor_resistance;     // R_L, ohm, >= 0
};

struct DimensionlessParams {
    double c;        // C0/C
    double gamma;    // sqrt(L/C)/R
    double gamma_l;  // R_L*sqrt(C/L)
    double k;        // R_L/R = gamma*gamma_l
    double omega0;   // 1/sqrt(LC), rad/s; 1 for synthetic parameter sets
    double z0;       // sqrt(L/C), ohm; 1 for synthetic parameter sets
};

// first-order form d/dtau (V1,V2,dV1,dV2) = A psi, A = [[0, I], [Ma, Mb]]
struct StateSpace {
    Mat2 ma;
    Mat2 mb;
    Mat4 a;
};

// coefficients of the coupled second-order pair, one line per node:
//   ddV_n = dv_self*dV_n + v_self*V_n + dd_cross*ddV_m + dv_cross*dV_m
struct SecondOrderLine {
    double dv_self;
    double v_self;
    double dd_cross;
    double dv_cross;

    // same line as 0 = sum(coeff * x) over (ddV_n, ddV_m, dV_n, dV_m, V_n, V_m)
    std::array<double, 6> homogeneous() const {
        return {1.0, -dd_cross, -dv_self, -dv_cross, -v_self, 0.0};
    }
};

struct SecondOrderCoeffs {
    SecondOrderLine line1;  // gain node
    SecondOrderLine line2;  // loss node
};

// per-sample branch currents in units of V/Z0; index 0 = node 1, 1 = node 2
struct CurrentBreakdown {
    Vec2 i_r;   // gain/loss element
    Vec2 i_c;   // tank capacitor
    Vec2 i_l;   // inductor branch (includes its series R_L)
    Vec2 i_c0;  // coupling capacitor, signed into the node
};

DimensionlessParams nondimensionalize(const PhysicalCircuit& pc);

// synthetic parameter set with omega0 = z0 = 1
DimensionlessParams from_dimensionless(double c, double gamma, double gamma_l);

SecondOrderCoeffs second_order_coeffs(const DimensionlessParams& p);

// eliminate the cross second derivatives from the coupled pair; returns
// (Ma, Mb) of ddV = Ma V + Mb dV
std::pair<Mat2, Mat2> eliminate_cross_accel(const SecondOrderCoeffs& sc);

StateSpace build_state_space(const DimensionlessParams& p);

// Reconstruct all branch currents from a sampled trajectory: derivatives by
// central differences (one-sided second order at the ends), inductor current
// by trapezoidal integration of V_n = gamma_l*i_L + di_L/dtau seeded from the
// node law at the first sample.
std::vector<CurrentBreakdown> reconstruct_currents(const DimensionlessParams& p,
                                                   const Trace& tr);

// Node-law residual i_R + i_C + i_C0 + i_L at each interior sample (size
// tr.size()-2, entry j for sample j+1).  Second-order small on exact
// trajectories, O(1) on corrupted ones.
std::vector<Vec2> kirchhoff_residual(const DimensionlessParams& p,
                                     const Trace& tr);

// Circuit parameter file: key=value lines, '#' comments.  Either all physical
// keys (L_henry, C_farad, C0_farad, R_ohm, RL_ohm) or all dimensionless keys
// (c, gamma, gamma_l); mixing the two families is an error.
struct CircuitSpec {
    struct Dimensionless {
        double c = 0.0;
        double gamma = 0.0;
        double gamma_l = 0.0;
    };
    std::optional<PhysicalCircuit> physical;
    std::optional<Dimensionless> dimensionless;
};

CircuitSpec parse_circuit_file(std::istream& is, const std::string& name);
CircuitSpec load_circuit_file(const std::string& path);
DimensionlessParams circuit_params(const CircuitSpec& cs);

}  // namespace ptcirc
