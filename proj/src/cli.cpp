#include "qdcav/cli.hpp"

#include "qdcav/config.hpp"
#include "qdcav/constants.hpp"
#include "qdcav/errors.hpp"
#include "qdcav/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace qdcav {

namespace {

struct CommonOpts {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;
    bool no_phonons = false;
    bool phonons = false;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--preset", opts.preset, "named preset: super-paper or re-paper");
    cmd->add_option("--config", opts.config_path, "key-value config file");
    cmd->add_option("--set", opts.overrides, "override one config key, key=value")
        ->take_all();
    cmd->add_flag("--no-phonons", opts.no_phonons, "disable the phonon environment");
    cmd->add_flag("--phonons", opts.phonons, "enable the phonon environment");
    cmd->add_option("--jobs", opts.jobs, "worker threads for sweeps (0 = all cores)");
}

RunConfig build_config(const CommonOpts& opts, const std::string& default_preset) {
    RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = parse_config_file(opts.config_path);
        if (!opts.preset.empty())
            throw ConfigError("--preset and --config are mutually exclusive");
    } else {
        const std::string name = opts.preset.empty() ? default_preset : opts.preset;
        if (name.empty())
            throw ConfigError("either --preset or --config is required");
        cfg = preset_config(name);
    }
    for (const auto& kv : opts.overrides) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.no_phonons) cfg.phonons.enabled = false;
    if (opts.phonons) cfg.phonons.enabled = true;
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    validate_config(cfg);
    return cfg;
}

std::vector<double> make_grid(const std::string& from, const std::string& to, int points) {
    if (points < 1) throw ConfigError("--points must be >= 1");
    const double a = parse_value_with_pi(from);
    const double b = parse_value_with_pi(to);
    if (points == 1) return {a};
    if (!(b > a)) throw ConfigError("--to must exceed --from");
    std::vector<double> grid(static_cast<std::size_t>(points), 0.0);
    for (int i = 0; i < points; ++i)
        grid[std::size_t(i)] = a + (b - a) * double(i) / double(points - 1);
    return grid;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const std::size_t dot = path.rfind('.');
    const std::size_t slash = path.rfind('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

void print_metrics(const MetricsRecord& m) {
    std::printf("rho01_int  = %.6g ps\n", m.rho01_int);
    std::printf("rho11_int  = %.6g ps\n", m.rho11_int);
    std::printf("rhoGX_int  = %.6g ps\n", m.rhoGX_int);
    std::printf("rhoXX_int  = %.6g ps\n", m.rhoXX_int);
    std::printf("n_int      = %.6g ps\n", m.photon_int);
    std::printf("rho22/rho11 max ratio = %.3g%s\n", m.rho22_rho11_ratio,
                m.ratio_degenerate ? " (degenerate: no photon occupation)" : "");
    if (m.tail_warning)
        std::printf("warning: emission not finished at t_end "
                    "(estimated missing rho01 weight %.2g%%)\n",
                    100.0 * m.tail_fraction);
}

Trajectory run_config(const RunConfig& cfg) {
    if (cfg.phonons.enabled)
        return propagate_with_phonons(cfg.drive, cfg.cavity, cfg.losses, cfg.solver,
                                      cfg.phonons, cfg.compression);
    return propagate(cfg.drive, cfg.cavity, cfg.losses, cfg.solver);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"quantum dot-cavity photon number coherence simulator"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    std::string sim_output, sim_metrics;
    CLI::App* sim = app.add_subcommand("simulate", "propagate one configuration");
    add_common(sim, sim_opts);
    sim->add_option("-o,--output", sim_output, "trajectory CSV path")->required();
    sim->add_option("--metrics", sim_metrics, "also write integrated metrics CSV");

    CommonOpts sweep_opts;
    std::string sweep_param = "theta2", sweep_from = "0", sweep_to = "30pi";
    std::string sweep_output;
    int sweep_points = 121;
    CLI::App* sw = app.add_subcommand("sweep", "sweep one parameter");
    add_common(sw, sweep_opts);
    sw->add_option("--param", sweep_param, "theta2, theta1/theta_re, or a config key");
    sw->add_option("--from", sweep_from, "grid start (accepts e.g. 0.25pi)");
    sw->add_option("--to", sweep_to, "grid end");
    sw->add_option("--points", sweep_points, "number of grid points");
    sw->add_option("-o,--output", sweep_output, "sweep CSV path")->required();

    CommonOpts opt_opts;
    std::string opt_from = "0.25pi", opt_to = "6pi", opt_output;
    int opt_points = 24;
    CLI::App* opt = app.add_subcommand(
        "optimize-re", "pick the resonant pulse area minimising rho01_int - rho11_int");
    add_common(opt, opt_opts);
    opt->add_option("--from", opt_from, "area grid start");
    opt->add_option("--to", opt_to, "area grid end");
    opt->add_option("--points", opt_points, "area grid points");
    opt->add_option("-o,--output", opt_output, "write the scanned grid as sweep CSV");

    CommonOpts cmp_opts;
    std::string cmp_param = "theta2", cmp_from = "0", cmp_to = "30pi", cmp_output;
    int cmp_points = 121;
    CLI::App* cmp = app.add_subcommand("compare-phonons",
                                       "run the same sweep with phonons on and off");
    add_common(cmp, cmp_opts);
    cmp->add_option("--param", cmp_param, "swept parameter");
    cmp->add_option("--from", cmp_from, "grid start");
    cmp->add_option("--to", cmp_to, "grid end");
    cmp->add_option("--points", cmp_points, "number of grid points");
    cmp->add_option("-o,--output", cmp_output, "output base path")->required();

    std::string val_path;
    CLI::App* val = app.add_subcommand("validate-config", "check a config file");
    val->add_option("config", val_path, "config file path")->required();

    try {
        app.parse(argc, argv);

        if (*sim) {
            RunConfig cfg = build_config(sim_opts, "");
            const Trajectory traj = run_config(cfg);
            write_trajectory_csv(sim_output, traj);
            const MetricsRecord m = integrate_metrics(traj);
            if (!sim_metrics.empty()) write_metrics_csv(sim_metrics, m);
            print_metrics(m);
        } else if (*sw) {
            SweepSpec spec;
            spec.parameter = sweep_param;
            spec.grid = make_grid(sweep_from, sweep_to, sweep_points);
            spec.base = build_config(sweep_opts, "super-paper");
            spec.phonons_on = spec.base.phonons.enabled;
            const SweepResult result = sweep(spec);
            write_sweep_csv(sweep_output, result);
            std::size_t failed = 0;
            for (const auto& row : result.rows)
                if (row.failed) ++failed;
            std::printf("sweep: %zu points written to %s (%zu failed)\n",
                        result.rows.size(), sweep_output.c_str(), failed);
            if (failed == result.rows.size())
                throw NumericalError("sweep: every grid point failed");
        } else if (*opt) {
            RunConfig cfg = build_config(opt_opts, "re-paper");
            std::vector<double> grid = make_grid(opt_from, opt_to, opt_points);
            const OptimizeResult result = optimize_re_area(cfg, grid);
            if (!opt_output.empty()) {
                SweepResult scan;
                scan.parameter = "theta_re";
                scan.rows = result.scan;
                write_sweep_csv(opt_output, scan);
            }
            std::printf("best area = %.4f pi\n", result.best_area_rad / pi);
            print_metrics(result.metrics);
        } else if (*cmp) {
            SweepSpec spec;
            spec.parameter = cmp_param;
            spec.grid = make_grid(cmp_from, cmp_to, cmp_points);
            spec.base = build_config(cmp_opts, "super-paper");
            const auto [on, off] = phonon_comparison(spec);
            const std::string path_on = with_suffix(cmp_output, "_phonons_on");
            const std::string path_off = with_suffix(cmp_output, "_phonons_off");
            write_sweep_csv(path_on, on);
            write_sweep_csv(path_off, off);
            std::printf("compare-phonons: wrote %s and %s\n", path_on.c_str(),
                        path_off.c_str());
        } else if (*val) {
            parse_config_file(val_path);
            std::printf("%s: OK\n", val_path.c_str());
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace qdcav
