// command line front end for the coupled gain/loss resonator toolkit

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptcirc/analysis.hpp"
#include "ptcirc/dynamics.hpp"
#include "ptcirc/errors.hpp"
#include "ptcirc/model.hpp"
#include "ptcirc/plotdata.hpp"
#include "ptcirc/sigproc.hpp"
#include "ptcirc/spectra.hpp"
#include "ptcirc/trace.hpp"

namespace {

using namespace ptcirc;

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Opts {
    std::optional<double> c, gamma, gamma_l;
    std::optional<double> L, C, C0, R, RL;
    std::string config;
    std::string out;
    std::string grid;
    std::string psi0 = "1,0,0,0";
    std::string trace_path;
    std::string mode;
    double dt = 0.005;
    double t_end = 400.0;
    int channel = 1;
    bool exact = false;
    bool si = false;
};

void add_circuit_opts(CLI::App* sub, Opts& o) {
    sub->add_option("--c", o.c, "coupling ratio C0/C");
    sub->add_option("--gamma", o.gamma, "gain/loss parameter sqrt(L/C)/R");
    sub->add_option("--gamma-l", o.gamma_l, "inductor loss parameter RL*sqrt(C/L)");
    sub->add_option("--L", o.L, "inductance, henry");
    sub->add_option("--C", o.C, "tank capacitance, farad");
    sub->add_option("--C0", o.C0, "coupling capacitance, farad");
    sub->add_option("--R", o.R, "gain/loss resistance, ohm");
    sub->add_option("--RL", o.RL, "inductor series resistance, ohm");
    sub->add_option("--config", o.config, "circuit parameter file");
    sub->add_flag("--si", o.si, "report in SI units instead of dimensionless");
}

void add_integrator_opts(CLI::App* sub, Opts& o) {
    sub->add_option("--dt", o.dt, "step in dimensionless time");
    sub->add_option("--t-end", o.t_end, "integration horizon");
    sub->add_option("--psi0", o.psi0, "initial state V1,V2,dV1,dV2");
    sub->add_flag("--exact", o.exact, "matrix-exponential propagation");
}

// flags override the config file; the physical and dimensionless families
// must not mix across the two sources either
DimensionlessParams resolve_params(const Opts& o) {
    const bool f_phys = o.L || o.C || o.C0 || o.R || o.RL;
    const bool f_dim = o.c || o.gamma || o.gamma_l;
    if (f_phys && f_dim)
        throw std::domain_error(
            "mixing physical flags (--L/--C/--C0/--R/--RL) with dimensionless "
            "flags (--c/--gamma/--gamma-l)");

    CircuitSpec cs;
    if (!o.config.empty()) cs = load_circuit_file(o.config);

    if (f_phys) {
        if (cs.dimensionless)
            throw std::domain_error("config file '" + o.config +
                                    "' is dimensionless but physical flags given");
        PhysicalCircuit pc =
            cs.physical ? *cs.physical : PhysicalCircuit{0, 0, 0, 0, 0};
        if (o.L) pc.inductance = *o.L;
        if (o.C) pc.capacitance = *o.C;
        if (o.C0) pc.coupling_capacitance = *o.C0;
        if (o.R) pc.resistance = *o.R;
        if (o.RL) pc.inductor_resistance = *o.RL;
        if (!cs.physical) {
            const std::pair<bool, const char*> need[] = {
                {bool(o.L), "--L"},
                {bool(o.C), "--C"},
                {bool(o.C0), "--C0"},
                {bool(o.R), "--R"},
            };
            for (const auto& [given, flag] : need)
                if (!given)
                    throw std::domain_error(std::string("missing ") + flag);
            if (!o.RL) pc.inductor_resistance = 0.0;
        }
        return nondimensionalize(pc);
    }

    if (f_dim) {
        if (cs.physical)
            throw std::domain_error("config file '" + o.config +
                                    "' is physical but dimensionless flags given");
        CircuitSpec::Dimensionless d =
            cs.dimensionless ? *cs.dimensionless
                             : CircuitSpec::Dimensionless{0.0, 0.0, 0.0};
        if (o.c) d.c = *o.c;
        if (o.gamma) d.gamma = *o.gamma;
        if (o.gamma_l) d.gamma_l = *o.gamma_l;
        if (!cs.dimensionless && !o.c)
            throw std::domain_error("missing --c");
        return from_dimensionless(d.c, d.gamma, d.gamma_l);
    }

    if (cs.physical || cs.dimensionless) return circuit_params(cs);
    throw std::domain_error("no circuit parameters: give --c/--gamma flags, "
                            "--L/--C/... flags, or --config FILE");
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3)
        throw std::domain_error("--grid wants start:stop:count, got '" + s + "'");
    char* end = nullptr;
    const double start = std::strtod(parts[0].c_str(), &end);
    if (*end) throw std::domain_error("bad --grid start '" + parts[0] + "'");
    const double stop = std::strtod(parts[1].c_str(), &end);
    if (*end) throw std::domain_error("bad --grid stop '" + parts[1] + "'");
    const long count = std::strtol(parts[2].c_str(), &end, 10);
    if (*end || count < 1)
        throw std::domain_error("bad --grid count '" + parts[2] + "'");
    return uniform_grid(start, stop, static_cast<std::size_t>(count));
}

Vec4 parse_psi0(const std::string& s) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        vals.push_back(std::strtod(item.c_str(), &end));
        if (*end) throw std::domain_error("bad --psi0 component '" + item + "'");
    }
    if (vals.size() != 4)
        throw std::domain_error("--psi0 wants 4 comma-separated values, got " +
                                std::to_string(vals.size()));
    return {vals[0], vals[1], vals[2], vals[3]};
}

// run `fn(stream)` against --out or stdout
template <class Fn>
void with_output(const std::string& out, Fn fn) {
    if (out.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream f(out);
    if (!f) throw FormatError("cannot open '" + out + "' for writing");
    fn(f);
    if (!f) throw FormatError("write to '" + out + "' failed");
}

void scale_spectrum(Spectrum& sp, double w0) {
    for (auto& w : sp.omega) w *= w0;
    for (auto& mp : sp.pairs) {
        mp.omega_plus *= w0;
        mp.omega_minus *= w0;
    }
}

int run(int argc, char** argv) {
    CLI::App app{"coupled gain/loss RLC resonator pair: spectra, dynamics, "
                 "mode estimation, parameter sweeps"};
    app.require_subcommand(1);
    Opts o;

    auto* spectrum = app.add_subcommand("spectrum", "complex eigenfrequencies");
    add_circuit_opts(spectrum, o);
    spectrum->add_option("--out", o.out, "output file (default stdout)");

    auto* ep = app.add_subcommand("ep", "exceptional point and growth onset");
    add_circuit_opts(ep, o);
    ep->add_option("--out", o.out, "output file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "integrate the circuit");
    add_circuit_opts(simulate, o);
    add_integrator_opts(simulate, o);
    simulate->add_option("--out", o.out, "trace file (default stdout)");

    auto* estimate =
        app.add_subcommand("estimate", "mode frequencies and envelope rate "
                                       "from a trace");
    estimate->add_option("trace", o.trace_path, "trace CSV file")->required();
    estimate->add_option("--channel", o.channel, "voltage channel, 1 or 2");
    add_circuit_opts(estimate, o);
    estimate->add_option("--out", o.out, "output file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "spectrum vs gamma");
    add_circuit_opts(sweep, o);
    sweep->add_option("--grid", o.grid, "gamma grid start:stop:count");
    sweep->add_option("--out", o.out, "output file (default stdout)");

    auto* gapslope =
        app.add_subcommand("gapslope", "avoided-crossing gap vs gamma_l");
    add_circuit_opts(gapslope, o);
    gapslope->add_option("--grid", o.grid, "gamma_l grid start:stop:count");
    gapslope->add_option("--out", o.out, "output file (default stdout)");

    auto* check = app.add_subcommand("check", "node-law residual of a trace");
    check->add_option("trace", o.trace_path, "trace CSV file")->required();
    add_circuit_opts(check, o);
    check->add_option("--out", o.out, "output file (default stdout)");

    auto* plotdata = app.add_subcommand("plotdata", "plot-ready curve files");
    plotdata->add_option("--mode", o.mode, "fig2 (spectrum sweep) or fig3 (trace)")
        ->required();
    add_circuit_opts(plotdata, o);
    add_integrator_opts(plotdata, o);
    plotdata->add_option("--grid", o.grid, "gamma grid start:stop:count");
    plotdata->add_option("--out", o.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (spectrum->parsed()) {
        const DimensionlessParams p = resolve_params(o);
        Spectrum sp = eigs_general(build_state_space(p));
        if (o.si) scale_spectrum(sp, p.omega0);
        with_output(o.out, [&](std::ostream& os) { write_spectrum_csv(sp, os); });
    } else if (ep->parsed()) {
        const DimensionlessParams p = resolve_params(o);
        const EpSearchResult r = locate_ep(p.c, p.gamma_l);
        const double growth =
            p.gamma_l > 0.0 ? growth_threshold(p.c, p.gamma_l)
                            : std::numeric_limits<double>::quiet_NaN();
        with_output(o.out, [&](std::ostream& os) {
            os << "gamma_star=" << num17(r.gamma_star) << '\n'
               << "min_gap=" << num17(r.min_gap) << '\n'
               << "method="
               << (r.method == EpMethod::Discriminant ? "discriminant"
                                                      : "golden_section")
               << '\n'
               << "iterations=" << r.iterations << '\n'
               << "growth_gamma=" << num17(growth) << '\n';
        });
    } else if (simulate->parsed()) {
        const DimensionlessParams p = resolve_params(o);
        IntegratorConfig cfg{o.dt, o.t_end, parse_psi0(o.psi0)};
        const StateSpace ss = build_state_space(p);
        Trace tr = o.exact ? exact_propagate(ss, cfg) : rk4_integrate(ss, cfg);
        const char* label = "tau";
        if (o.si) {
            tr.t0 /= p.omega0;
            tr.dt /= p.omega0;
            if (tr.terminal) tr.terminal->first /= p.omega0;
            label = "t_s";
        }
        with_output(o.out,
                    [&](std::ostream& os) { write_trace_csv(tr, os, label); });
    } else if (estimate->parsed()) {
        const Trace tr = read_trace_csv(o.trace_path);
        SpectralEstimate est = estimate_modes(tr, o.channel);
        if (o.si) {
            const DimensionlessParams p = resolve_params(o);
            for (auto& f : est.frequencies) f *= p.omega0;
            est.rate *= p.omega0;
        }
        with_output(o.out, [&](std::ostream& os) { write_estimate(est, os); });
    } else if (sweep->parsed()) {
        const DimensionlessParams p = resolve_params(o);
        const auto grid =
            parse_grid(o.grid.empty() ? "0.05:0.5:400" : o.grid);
        SweepResult sw =
            sweep_gamma(p.c, p.gamma_l, grid, SweepSource::DirectEigen);
        if (o.si) {
            for (auto& sp : sw.spectra) scale_spectrum(sp, p.omega0);
            for (auto& cr : sw.coalescence) cr.real_gap *= p.omega0;
        }
        with_output(o.out, [&](std::ostream& os) { write_sweep_csv(sw, os); });
    } else if (gapslope->parsed()) {
        const DimensionlessParams p = resolve_params(o);
        const auto grid = parse_grid(o.grid.empty() ? "0.02:0.2:10" : o.grid);
        const auto [slope, resid] = gap_slope_vs_gamma_l(p.c, grid);
        with_output(o.out, [&](std::ostream& os) {
            os << "slope=" << num17(slope) << '\n'
               << "residual=" << num17(resid) << '\n';
        });
    } else if (check->parsed()) {
        const DimensionlessParams p = resolve_params(o);
        const Trace tr = read_trace_csv(o.trace_path);
        const auto res = kirchhoff_residual(p, tr);
        double m1 = 0.0, m2 = 0.0;
        for (const auto& r : res) {
            m1 = std::max(m1, std::fabs(r[0]));
            m2 = std::max(m2, std::fabs(r[1]));
        }
        with_output(o.out, [&](std::ostream& os) {
            os << "samples=" << tr.size() << '\n'
               << "max_residual_node1=" << num17(m1) << '\n'
               << "max_residual_node2=" << num17(m2) << '\n';
        });
    } else if (plotdata->parsed()) {
        if (o.mode == "fig2") {
            const DimensionlessParams p = resolve_params(o);
            const auto grid =
                parse_grid(o.grid.empty() ? "0.05:0.5:400" : o.grid);
            const SweepResult sw =
                sweep_gamma(p.c, p.gamma_l, grid, SweepSource::DirectEigen);
            std::cout << emit_plot_data(sw, o.out) << '\n';
        } else if (o.mode == "fig3") {
            const DimensionlessParams p = resolve_params(o);
            IntegratorConfig cfg{o.dt, o.t_end, parse_psi0(o.psi0)};
            const StateSpace ss = build_state_space(p);
            const Trace tr =
                o.exact ? exact_propagate(ss, cfg) : rk4_integrate(ss, cfg);
            std::cout << emit_plot_data(tr, o.out) << '\n';
        } else {
            throw std::domain_error("--mode must be fig2 or fig3, got '" +
                                    o.mode + "'");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const OverflowError& e) {
        std::cerr << "error: " << e.what() << " (reached tau = "
                  << num17(e.time_reached) << ")\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
