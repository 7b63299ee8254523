#pragma once

#include "qdcav/config.hpp"
#include "qdcav/observables.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qdcav {

// One-parameter sweep: "theta2" and "theta_re"/"theta1" address the second
// and first pulse areas (grid values in radians); any other name is treated
// as a config key and assigned the grid value directly.
struct SweepSpec {
    std::string parameter = "theta2";
    std::vector<double> grid;
    RunConfig base;
    bool phonons_on = true;           // overrides base.phonons.enabled
    double snapshot_offset_ps = 10.0; // snapshot at first pulse centre + offset
};

void validate(const SweepSpec& spec);

struct SweepRow {
    double value = 0.0;
    MetricsRecord metrics;
    double snapshot_rho_xx = 0.0;
    double snapshot_abs_gx = 0.0;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::string parameter;
    std::vector<SweepRow> rows;
};

// Runs one full simulation per grid point on a worker pool (jobs = 0 picks
// hardware concurrency). Rows are ordered by grid index and individually
// reproducible; a failing point is recorded in its row without aborting
// the sweep.
SweepResult sweep(const SweepSpec& spec);

// Applies a sweep parameter value to a config (exposed for tests).
RunConfig config_at(const SweepSpec& spec, double value);

struct OptimizeResult {
    double best_area_rad = 0.0;
    MetricsRecord metrics;
    std::vector<SweepRow> scan;
};

// Picks the pulse area of a single-pulse (resonant) drive that minimises
// rho01_int - rho11_int over the grid, then refines by golden-section
// search to 0.01 pi resolution.
OptimizeResult optimize_re_area(const RunConfig& base, std::span<const double> theta_grid);

// Same grid swept with phonons on and off (first/second of the pair).
std::pair<SweepResult, SweepResult> phonon_comparison(const SweepSpec& spec);

// CSV schema:
//   param_value,rho01_int,rho11_int,rhoGX_int,rhoXX_int,n_int,
//   snapshot_rhoXX_10ps,snapshot_absGX_10ps
// Failed rows keep their parameter value and carry nan metrics.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_csv(const std::string& path, const SweepResult& result);
SweepResult read_sweep_csv(std::istream& in);
SweepResult read_sweep_csv(const std::string& path);

}  // namespace qdcav
