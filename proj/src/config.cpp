#include "qdcav/config.hpp"

#include "qdcav/constants.hpp"
#include "qdcav/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qdcav {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string text(trim(value));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("key '" + std::string(key) + "': invalid number '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError("key '" + std::string(key) + "': invalid number '" + text + "'");
    return v;
}

int parse_int(std::string_view key, std::string_view value) {
    const double v = parse_double(key, value);
    const int i = static_cast<int>(std::lround(v));
    if (double(i) != v)
        throw ConfigError("key '" + std::string(key) + "': expected an integer");
    return i;
}

bool parse_bool(std::string_view key, std::string_view value) {
    const std::string_view v = trim(value);
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("key '" + std::string(key) + "': expected a boolean");
}

// drive.pulseN.field, N = 1-based
bool apply_drive_key(RunConfig& cfg, std::string_view key, std::string_view rest,
                     std::string_view value) {
    if (rest.substr(0, 5) != "pulse") return false;
    rest.remove_prefix(5);
    const std::size_t dot = rest.find('.');
    if (dot == std::string_view::npos) return false;
    int index = 0;
    const auto num = rest.substr(0, dot);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), index);
    if (ec != std::errc() || p != num.data() + num.size() || index < 1)
        throw ConfigError("key '" + std::string(key) + "': bad pulse index");
    if (index > 8)
        throw ConfigError("key '" + std::string(key) + "': at most 8 pulses supported");
    if (static_cast<std::size_t>(index) > cfg.drive.pulses.size())
        cfg.drive.pulses.resize(std::size_t(index));
    PulseSpec& pulse = cfg.drive.pulses[std::size_t(index) - 1];

    const std::string_view field = rest.substr(dot + 1);
    if (field == "area_pi")
        pulse.area_rad = parse_double(key, value) * pi;
    else if (field == "sigma_ps")
        pulse.sigma_ps = parse_double(key, value);
    else if (field == "detuning_mev")
        pulse.detuning_mev = parse_double(key, value);
    else if (field == "delay_ps")
        pulse.delay_ps = parse_double(key, value);
    else if (field == "phase_rad")
        pulse.phase_rad = parse_double(key, value);
    else
        return false;
    return true;
}

}  // namespace

RunConfig preset_config(std::string_view name) {
    RunConfig cfg;
    cfg.drive = preset_drive(name);
    return cfg;
}

double parse_value_with_pi(std::string_view text) {
    std::string_view t = trim(text);
    double factor = 1.0;
    if (t.size() >= 2 && t.substr(t.size() - 2) == "pi") {
        factor = pi;
        t.remove_suffix(2);
        if (t.empty()) return pi;
    }
    const std::string body(trim(t));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(body, &used);
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value '" + std::string(text) + "'");
    }
    if (used != body.size())
        throw ConfigError("invalid numeric value '" + std::string(text) + "'");
    return v * factor;
}

void apply_config_key(RunConfig& cfg, std::string_view key_in, std::string_view value) {
    const std::string_view key = trim(key_in);
    const std::size_t dot = key.find('.');
    const std::string_view section = key.substr(0, dot);
    const std::string_view rest = dot == std::string_view::npos ? "" : key.substr(dot + 1);

    const auto unknown = [&]() -> void {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    };

    if (section == "drive") {
        if (!apply_drive_key(cfg, key, rest, value)) unknown();
    } else if (section == "cavity") {
        if (rest == "coupling_mev")
            cfg.cavity.coupling_mev = parse_double(key, value);
        else if (rest == "detuning_mev")
            cfg.cavity.detuning_mev = parse_double(key, value);
        else if (rest == "n_max")
            cfg.cavity.n_max = parse_int(key, value);
        else
            unknown();
    } else if (section == "losses") {
        if (rest == "gamma_mev")
            cfg.losses.gamma = rate_from_energy(parse_double(key, value));
        else if (rest == "kappa_mev")
            cfg.losses.kappa = rate_from_energy(parse_double(key, value));
        else if (rest == "gamma_per_ps")
            cfg.losses.gamma = parse_double(key, value);
        else if (rest == "kappa_per_ps")
            cfg.losses.kappa = parse_double(key, value);
        else
            unknown();
    } else if (section == "solver") {
        if (rest == "t_start_ps")
            cfg.solver.t_start = parse_double(key, value);
        else if (rest == "t_end_ps")
            cfg.solver.t_end = parse_double(key, value);
        else if (rest == "rtol")
            cfg.solver.rtol = parse_double(key, value);
        else if (rest == "atol")
            cfg.solver.atol = parse_double(key, value);
        else if (rest == "max_step_pulse_ps")
            cfg.solver.max_step_pulse = parse_double(key, value);
        else if (rest == "max_step_tail_ps")
            cfg.solver.max_step_tail = parse_double(key, value);
        else if (rest == "fixed_dt_ps")
            cfg.solver.fixed_dt = parse_double(key, value);
        else if (rest == "output_stride_ps")
            cfg.solver.output_stride = parse_double(key, value);
        else if (rest == "positivity_stride")
            cfg.solver.positivity_stride = parse_int(key, value);
        else if (rest == "validity_tol")
            cfg.solver.validity_tol = parse_double(key, value);
        else
            unknown();
    } else if (section == "phonons") {
        if (rest == "enabled")
            cfg.phonons.enabled = parse_bool(key, value);
        else if (rest == "temperature_k")
            cfg.phonons.temperature_k = parse_double(key, value);
        else if (rest == "a_e_nm") {
            // keep the default hole radius tied to a_e unless set explicitly
            const bool tied = cfg.phonons.a_h_nm == cfg.phonons.a_e_nm / 1.15;
            cfg.phonons.a_e_nm = parse_double(key, value);
            if (tied) cfg.phonons.a_h_nm = cfg.phonons.a_e_nm / 1.15;
        } else if (rest == "a_h_nm")
            cfg.phonons.a_h_nm = parse_double(key, value);
        else if (rest == "d_e_ev")
            cfg.phonons.d_e_ev = parse_double(key, value);
        else if (rest == "d_h_ev")
            cfg.phonons.d_h_ev = parse_double(key, value);
        else if (rest == "density_kg_m3")
            cfg.phonons.density_kg_m3 = parse_double(key, value);
        else if (rest == "sound_velocity_m_s")
            cfg.phonons.sound_velocity_m_s = parse_double(key, value);
        else if (rest == "coupling_scale")
            cfg.phonons.coupling_scale = parse_double(key, value);
        else if (rest == "dt_ps")
            cfg.phonons.dt_ps = parse_double(key, value);
        else if (rest == "memory_ps")
            cfg.phonons.memory_ps = parse_double(key, value);
        else
            unknown();
    } else if (section == "compression") {
        if (rest == "svd_threshold")
            cfg.compression.svd_threshold = parse_double(key, value);
        else if (rest == "max_bond")
            cfg.compression.max_bond = parse_int(key, value);
        else
            unknown();
    } else if (section == "output") {
        if (rest == "path")
            cfg.output_path = std::string(trim(value));
        else
            unknown();
    } else if (section == "run") {
        if (rest == "deterministic")
            cfg.deterministic = parse_bool(key, value);
        else if (rest == "jobs")
            cfg.jobs = parse_int(key, value);
        else
            unknown();
    } else {
        unknown();
    }
}

RunConfig parse_config_text(std::string_view text, const std::string& origin) {
    RunConfig cfg;
    cfg.drive.pulses.clear();  // pulses come from the file
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        apply_config_key(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (cfg.drive.pulses.empty())
        throw ConfigError(origin + ": no drive.pulseN keys found (at least one pulse required)");
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream body;
    body << f.rdbuf();
    return parse_config_text(body.str(), path);
}

void validate_config(const RunConfig& cfg) {
    for (std::size_t i = 0; i < cfg.drive.pulses.size(); ++i) {
        const auto& p = cfg.drive.pulses[i];
        const std::string prefix = "drive.pulse" + std::to_string(i + 1) + ".";
        if (!(p.sigma_ps > 0.0))
            throw ConfigError("key '" + prefix + "sigma_ps' must be positive");
        if (p.area_rad < 0.0)
            throw ConfigError("key '" + prefix + "area_pi' must be non-negative");
    }
    if (cfg.cavity.coupling_mev < 0.0)
        throw ConfigError("key 'cavity.coupling_mev' must be non-negative");
    if (cfg.cavity.n_max < 1)
        throw ConfigError("key 'cavity.n_max' must be >= 1");
    if (cfg.losses.gamma < 0.0)
        throw ConfigError("key 'losses.gamma_mev' must be non-negative");
    if (cfg.losses.kappa < 0.0)
        throw ConfigError("key 'losses.kappa_mev' must be non-negative");
    if (!(cfg.solver.t_end > cfg.solver.t_start))
        throw ConfigError("key 'solver.t_end_ps' must exceed solver.t_start_ps");
    if (!(cfg.solver.output_stride > 0.0))
        throw ConfigError("key 'solver.output_stride_ps' must be positive");
    if (!(cfg.solver.max_step_pulse > 0.0))
        throw ConfigError("key 'solver.max_step_pulse_ps' must be positive");
    if (!(cfg.solver.max_step_tail > 0.0))
        throw ConfigError("key 'solver.max_step_tail_ps' must be positive");
    bool detuned = false;
    for (const auto& p : cfg.drive.pulses)
        if (p.detuning_mev != 0.0 && p.area_rad > 0.0) detuned = true;
    if (detuned && cfg.solver.max_step_pulse > 0.02)
        throw ConfigError(
            "key 'solver.max_step_pulse_ps' must be <= 0.02 with detuned lasers");
    if (cfg.phonons.temperature_k < 0.0)
        throw ConfigError("key 'phonons.temperature_k' must be >= 0");
    if (!(cfg.phonons.a_e_nm > 0.0))
        throw ConfigError("key 'phonons.a_e_nm' must be positive");
    if (!(cfg.phonons.a_h_nm > 0.0))
        throw ConfigError("key 'phonons.a_h_nm' must be positive");
    if (cfg.phonons.coupling_scale < 0.0)
        throw ConfigError("key 'phonons.coupling_scale' must be >= 0");
    if (!(cfg.phonons.dt_ps > 0.0))
        throw ConfigError("key 'phonons.dt_ps' must be positive");
    if (!(cfg.phonons.memory_ps > 0.0))
        throw ConfigError("key 'phonons.memory_ps' must be positive");
    if (!(cfg.compression.svd_threshold > 0.0) || !(cfg.compression.svd_threshold < 1.0))
        throw ConfigError("key 'compression.svd_threshold' must be in (0, 1)");
    if (cfg.compression.max_bond < 1)
        throw ConfigError("key 'compression.max_bond' must be >= 1");
    if (cfg.jobs < 0)
        throw ConfigError("key 'run.jobs' must be >= 0");
}

}  // namespace qdcav
