#include "ptcirc/plotdata.hpp"

#include <filesystem>
#include <fstream>

#include "ptcirc/errors.hpp"
#include "num_io.hpp"

namespace ptcirc {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw FormatError("cannot open '" + p.string() + "' for writing");
    return f;
}

void write_xy(const fs::path& p, const std::vector<double>& x,
              const std::vector<double>& y) {
    auto f = open_out(p);
    f << "x,y\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        f << detail::num17(x[i]) << ',' << detail::num17(y[i]) << '\n';
}

}  // namespace

std::string emit_plot_data(const SweepResult& sr, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);

    auto manifest = open_out(base / "manifest.csv");
    manifest << "file,label\n";
    if (sr.grid.empty()) return (base / "manifest.csv").string();

    const struct {
        const char* file;
        const char* label;
        int pair;
        bool real;
    } curves[] = {
        {"omega_r_branch1.csv", "Re omega, branch 1", 0, true},
        {"omega_r_branch2.csv", "Re omega, branch 2", 1, true},
        {"omega_i_branch1.csv", "Im omega, branch 1", 0, false},
        {"omega_i_branch2.csv", "Im omega, branch 2", 1, false},
    };
    for (const auto& cv : curves) {
        std::vector<double> y(sr.grid.size());
        for (std::size_t i = 0; i < sr.grid.size(); ++i) {
            const Complex w = sr.spectra[i].pairs[cv.pair].omega_plus;
            y[i] = cv.real ? w.real() : w.imag();
        }
        write_xy(base / cv.file, sr.grid, y);
        manifest << cv.file << ',' << cv.label << '\n';
    }
    return (base / "manifest.csv").string();
}

std::string emit_plot_data(const Trace& tr, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);

    std::vector<double> t(tr.size()), v1(tr.size()), v2(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        t[i] = tr.time(i);
        v1[i] = tr.samples[i][0];
        v2[i] = tr.samples[i][1];
    }
    if (tr.terminal) {
        t.push_back(tr.terminal->first);
        v1.push_back(tr.terminal->second[0]);
        v2.push_back(tr.terminal->second[1]);
    }

    auto manifest = open_out(base / "manifest.csv");
    manifest << "file,label\n";
    write_xy(base / "v1_vs_tau.csv", t, v1);
    manifest << "v1_vs_tau.csv,V1 vs tau\n";
    write_xy(base / "v2_vs_tau.csv", t, v2);
    manifest << "v2_vs_tau.csv,V2 vs tau\n";
    return (base / "manifest.csv").string();
}

}  // namespace ptcirc
