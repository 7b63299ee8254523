#include "qdcav/sweep.hpp"

#include "qdcav/constants.hpp"
#include "qdcav/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace qdcav {

namespace {

void run_indexed(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    unsigned n_threads = jobs > 0 ? unsigned(jobs) : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, unsigned(n)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t)
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

Trajectory run_config(const RunConfig& cfg) {
    if (cfg.phonons.enabled)
        return propagate_with_phonons(cfg.drive, cfg.cavity, cfg.losses, cfg.solver,
                                      cfg.phonons, cfg.compression);
    return propagate(cfg.drive, cfg.cavity, cfg.losses, cfg.solver);
}

SweepRow evaluate_row(const RunConfig& cfg, double value, double snapshot_offset) {
    SweepRow row;
    row.value = value;
    const Trajectory traj = run_config(cfg);
    row.metrics = integrate_metrics(traj);

    const double t0 = cfg.drive.pulses.front().delay_ps;
    const double target = t0 + snapshot_offset;
    std::size_t best = 0;
    for (std::size_t i = 1; i < traj.size(); ++i)
        if (std::abs(traj.times[i] - target) < std::abs(traj.times[best] - target)) best = i;
    row.snapshot_rho_xx = traj.rho_xx(best);
    row.snapshot_abs_gx = std::abs(traj.rho_gx(best));
    return row;
}

}  // namespace

void validate(const SweepSpec& spec) {
    if (spec.grid.empty()) throw ConfigError("sweep: grid must be non-empty");
    for (std::size_t i = 1; i < spec.grid.size(); ++i)
        if (!(spec.grid[i] > spec.grid[i - 1]))
            throw ConfigError("sweep: grid must be strictly increasing");
    validate_config(spec.base);
}

RunConfig config_at(const SweepSpec& spec, double value) {
    RunConfig cfg = spec.base;
    cfg.phonons.enabled = spec.phonons_on;
    if (spec.parameter == "theta2") {
        if (cfg.drive.pulses.size() < 2)
            throw ConfigError("sweep parameter 'theta2' needs a two-pulse drive");
        cfg.drive.pulses[1].area_rad = value;
    } else if (spec.parameter == "theta1" || spec.parameter == "theta_re") {
        cfg.drive.pulses[0].area_rad = value;
    } else {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        apply_config_key(cfg, spec.parameter, buf);
    }
    validate_config(cfg);
    return cfg;
}

SweepResult sweep(const SweepSpec& spec) {
    validate(spec);
    SweepResult result;
    result.parameter = spec.parameter;
    result.rows.resize(spec.grid.size());
    run_indexed(spec.grid.size(), spec.base.jobs, [&](std::size_t i) {
        const double value = spec.grid[i];
        try {
            result.rows[i] = evaluate_row(config_at(spec, value), value,
                                          spec.snapshot_offset_ps);
        } catch (const std::exception& e) {
            result.rows[i].value = value;
            result.rows[i].failed = true;
            result.rows[i].error = e.what();
        }
    });
    return result;
}

OptimizeResult optimize_re_area(const RunConfig& base, std::span<const double> theta_grid) {
    if (theta_grid.empty()) throw ConfigError("optimize_re_area: empty grid");
    if (base.drive.pulses.size() != 1)
        throw ConfigError("optimize_re_area: base config must drive a single pulse");

    SweepSpec spec;
    spec.parameter = "theta_re";
    spec.grid.assign(theta_grid.begin(), theta_grid.end());
    spec.base = base;
    spec.phonons_on = base.phonons.enabled;
    validate(spec);

    SweepResult scan = sweep(spec);
    const auto objective_of = [](const SweepRow& row) {
        return row.metrics.rho01_int - row.metrics.rho11_int;
    };

    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
        if (scan.rows[i].failed) continue;
        if (best == std::numeric_limits<std::size_t>::max() ||
            objective_of(scan.rows[i]) < objective_of(scan.rows[best]))
            best = i;
    }
    if (best == std::numeric_limits<std::size_t>::max())
        throw NumericalError("optimize_re_area: every grid point failed");

    const auto evaluate = [&](double theta) {
        return evaluate_row(config_at(spec, theta), theta, spec.snapshot_offset_ps);
    };

    // golden-section refinement inside the bracketing grid cells
    double a = spec.grid[best > 0 ? best - 1 : best];
    double b = spec.grid[best + 1 < spec.grid.size() ? best + 1 : best];
    SweepRow best_row = scan.rows[best];
    if (b > a) {
        const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        SweepRow r1 = evaluate(x1);
        SweepRow r2 = evaluate(x2);
        while (b - a > 0.01 * pi) {
            if (objective_of(r1) <= objective_of(r2)) {
                b = x2;
                x2 = x1;
                r2 = r1;
                x1 = b - inv_phi * (b - a);
                r1 = evaluate(x1);
            } else {
                a = x1;
                x1 = x2;
                r1 = r2;
                x2 = a + inv_phi * (b - a);
                r2 = evaluate(x2);
            }
        }
        const SweepRow& refined = objective_of(r1) <= objective_of(r2) ? r1 : r2;
        if (objective_of(refined) < objective_of(best_row)) best_row = refined;
    }

    OptimizeResult out;
    out.best_area_rad = best_row.value;
    out.metrics = best_row.metrics;
    out.scan = std::move(scan.rows);
    return out;
}

std::pair<SweepResult, SweepResult> phonon_comparison(const SweepSpec& spec) {
    SweepSpec on = spec;
    on.phonons_on = true;
    SweepSpec off = spec;
    off.phonons_on = false;
    return {sweep(on), sweep(off)};
}

namespace {

void append_field(std::string& line, double v, bool first = false) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (!first) line += ',';
    line += buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "param_value,rho01_int,rho11_int,rhoGX_int,rhoXX_int,n_int,"
           "snapshot_rhoXX_10ps,snapshot_absGX_10ps\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : result.rows) {
        std::string line;
        append_field(line, row.value, true);
        append_field(line, row.failed ? nan : row.metrics.rho01_int);
        append_field(line, row.failed ? nan : row.metrics.rho11_int);
        append_field(line, row.failed ? nan : row.metrics.rhoGX_int);
        append_field(line, row.failed ? nan : row.metrics.rhoXX_int);
        append_field(line, row.failed ? nan : row.metrics.photon_int);
        append_field(line, row.failed ? nan : row.snapshot_rho_xx);
        append_field(line, row.failed ? nan : row.snapshot_abs_gx);
        out << line << '\n';
    }
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    write_sweep_csv(f, result);
}

SweepResult read_sweep_csv(std::istream& in) {
    SweepResult result;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sweep CSV: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[8];
        std::size_t pos = 0;
        for (int col = 0; col < 8; ++col) {
            const std::size_t next = line.find(',', pos);
            const std::string field = line.substr(
                pos, next == std::string::npos ? std::string::npos : next - pos);
            try {
                v[col] = std::stod(field);
            } catch (const std::exception&) {
                throw ConfigError("sweep CSV: bad numeric field '" + field + "'");
            }
            if (next == std::string::npos && col != 7)
                throw ConfigError("sweep CSV: expected 8 columns");
            pos = next + 1;
        }
        SweepRow row;
        row.value = v[0];
        row.failed = std::isnan(v[1]);
        row.metrics.rho01_int = v[1];
        row.metrics.rho11_int = v[2];
        row.metrics.rhoGX_int = v[3];
        row.metrics.rhoXX_int = v[4];
        row.metrics.photon_int = v[5];
        row.snapshot_rho_xx = v[6];
        row.snapshot_abs_gx = v[7];
        result.rows.push_back(std::move(row));
    }
    return result;
}

SweepResult read_sweep_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open sweep CSV '" + path + "'");
    return read_sweep_csv(f);
}

}  // namespace qdcav
