#include "ptcirc/trace.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ptcirc/errors.hpp"
#include "num_io.hpp"

namespace ptcirc {

namespace {

void write_row(std::ostream& os, double t, const Vec4& s) {
    os << detail::num17(t) << ',' << detail::num17(s[0]) << ','
       << detail::num17(s[1]) << ',' << detail::num17(s[2]) << ','
       << detail::num17(s[3]) << '\n';
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(detail::trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(detail::trim(cur));
    return out;
}

}  // namespace

void write_trace_csv(const Trace& tr, std::ostream& os, const char* time_label) {
    os << time_label << ",V1,V2,dV1,dV2\n";
    for (std::size_t i = 0; i < tr.size(); ++i)
        write_row(os, tr.time(i), tr.samples[i]);
    if (tr.terminal) write_row(os, tr.terminal->first, tr.terminal->second);
}

void write_trace_csv(const Trace& tr, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    write_trace_csv(tr, f);
    if (!f) throw FormatError("write to '" + path + "' failed");
}

Trace read_trace_csv(std::istream& is) {
    std::vector<double> times;
    std::vector<Vec4> rows;
    int ncols = 0;
    std::string line;
    int lineno = 0;
    bool header_allowed = true;

    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;

        const auto fields = split_fields(stripped);
        double first;
        if (header_allowed && !detail::parse_double(fields[0], first)) {
            // single leading non-numeric line is a header
            header_allowed = false;
            continue;
        }
        header_allowed = false;

        if (ncols == 0) {
            if (fields.size() != 5 && fields.size() != 2)
                throw FormatError("line " + std::to_string(lineno) +
                                  ": expected 2 or 5 columns, got " +
                                  std::to_string(fields.size()));
            ncols = static_cast<int>(fields.size());
        } else if (static_cast<int>(fields.size()) != ncols) {
            throw FormatError("line " + std::to_string(lineno) + ": expected " +
                              std::to_string(ncols) + " columns, got " +
                              std::to_string(fields.size()));
        }

        Vec4 s{};
        double t;
        if (!detail::parse_double(fields[0], t))
            throw FormatError("line " + std::to_string(lineno) + ": bad number '" +
                              fields[0] + "'");
        for (int j = 1; j < ncols; ++j) {
            double v;
            if (!detail::parse_double(fields[j], v))
                throw FormatError("line " + std::to_string(lineno) +
                                  ": bad number '" + fields[j] + "'");
            s[j - 1] = v;
        }
        times.push_back(t);
        rows.push_back(s);
    }

    if (times.size() < 2) throw FormatError("trace needs at least 2 samples");

    Trace tr;
    tr.channels = ncols == 5 ? 4 : 1;
    tr.t0 = times[0];
    tr.dt = times[1] - times[0];
    if (!(tr.dt > 0.0)) throw FormatError("time column must be increasing");

    const double tol = 1e-9 * std::max(1.0, tr.dt);
    std::size_t n = times.size();
    bool short_last = false;
    for (std::size_t i = 2; i < n; ++i) {
        const double step = times[i] - times[i - 1];
        if (std::fabs(step - tr.dt) <= tol) continue;
        if (i == n - 1 && step > 0.0 && step < tr.dt) {
            short_last = true;
            continue;
        }
        throw FormatError("non-uniform sampling at line interval " +
                          std::to_string(i) + ": step " + detail::num17(step) +
                          " vs " + detail::num17(tr.dt));
    }

    if (short_last) {
        tr.terminal = {times[n - 1], rows[n - 1]};
        --n;
    }
    tr.samples.assign(rows.begin(), rows.begin() + static_cast<long>(n));
    return tr;
}

Trace read_trace_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open trace file '" + path + "'");
    return read_trace_csv(f);
}

}  // namespace ptcirc
