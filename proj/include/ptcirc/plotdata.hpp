#pragma once

#include <string>
#include <vector>

#include "ptcirc/analysis.hpp"
#include "ptcirc/trace.hpp"

namespace ptcirc {

// Two-column (x, y) plot files plus a manifest listing file names and curve
// labels, written into `dir`.  The sweep form emits one file per spectral
// branch (omega_r and omega_i vs gamma), the trace form V1 and V2 vs tau.
// Returns the manifest path.
std::string emit_plot_data(const SweepResult& sr, const std::string& dir);
std::string emit_plot_data(const Trace& tr, const std::string& dir);

}  // namespace ptcirc
