#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptcirc/smallmat.hpp"

namespace ptcirc {

// Uniformly sampled trajectory in dimensionless time tau.  samples[i] is
// (V1, V2, dV1, dV2) at tau = t0 + i*dt.  When the integration horizon is not
// a multiple of dt the exactly-landed final state is kept separately in
// `terminal` so the uniform grid stays uniform for spectral work.
struct Trace {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<Vec4> samples;
    std::optional<std::pair<double, Vec4>> terminal;
    // 4 for full state traces, 1 for single-column measured data
    int channels = 4;

    std::size_t size() const { return samples.size(); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }

    double end_time() const {
        if (terminal) return terminal->first;
        return samples.empty() ? t0 : time(samples.size() - 1);
    }
    const Vec4& end_state() const {
        return terminal ? terminal->second : samples.back();
    }
};

// CSV round trip.  Writer emits header tau,V1,V2,dV1,dV2 and 17 significant
// digits per value.  Reader accepts that form or two-column tau,V measured
// data, tolerates comment lines starting with '#', infers dt from the first
// interval and rejects non-uniform interiors; a single short final interval
// becomes the terminal sample.
void write_trace_csv(const Trace& tr, std::ostream& os,
                     const char* time_label = "tau");
void write_trace_csv(const Trace& tr, const std::string& path);
Trace read_trace_csv(std::istream& is);
Trace read_trace_csv(const std::string& path);

}  // namespace ptcirc
