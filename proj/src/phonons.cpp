#include "qdcav/phonons.hpp"

#include "qdcav/constants.hpp"
#include "qdcav/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qdcav {

namespace {

constexpr double hbar_si = 1.054571817e-34;  // J s
constexpr double ev_to_joule = 1.602176634e-19;

// coth(hbar w / 2 kB T) with the T = 0 limit handled exactly.
double thermal_coth(double omega_rad_ps, double temperature_k) {
    if (temperature_k <= 0.0) return 1.0;
    const double x = hbar_mev_ps * omega_rad_ps / (2.0 * kb_mev_per_k * temperature_k);
    if (x > 20.0) return 1.0;
    return 1.0 / std::tanh(x);
}

}  // namespace

int PhononSpec::memory_steps() const {
    return std::max(1, static_cast<int>(std::lround(memory_ps / dt_ps)));
}

void validate(const PhononSpec& spec) {
    if (spec.temperature_k < 0.0)
        throw std::invalid_argument("PhononSpec: temperature must be >= 0");
    if (!(spec.a_e_nm > 0.0) || !(spec.a_h_nm > 0.0))
        throw std::invalid_argument("PhononSpec: localisation radii must be positive");
    if (!(spec.density_kg_m3 > 0.0) || !(spec.sound_velocity_m_s > 0.0))
        throw std::invalid_argument("PhononSpec: material constants must be positive");
    if (spec.coupling_scale < 0.0)
        throw std::invalid_argument("PhononSpec: coupling_scale must be >= 0");
    if (!(spec.dt_ps > 0.0))
        throw std::invalid_argument("PhononSpec: dt must be positive");
    if (!(spec.memory_ps > 0.0))
        throw std::invalid_argument("PhononSpec: memory_ps must be positive");
}

double spectral_density(const PhononSpec& spec, double omega_rad_ps) {
    if (omega_rad_ps < 0.0)
        throw std::invalid_argument("spectral_density: omega must be >= 0");
    if (spec.coupling_scale == 0.0 || omega_rad_ps == 0.0) return 0.0;

    const double omega_si = omega_rad_ps * 1e12;               // rad/s
    const double c = spec.sound_velocity_m_s;
    const double a_e = spec.a_e_nm * 1e-9;
    const double a_h = spec.a_h_nm * 1e-9;
    const double d_e = spec.d_e_ev * ev_to_joule;
    const double d_h = spec.d_h_ev * ev_to_joule;

    const double form_e = d_e * std::exp(-omega_si * omega_si * a_e * a_e / (4.0 * c * c));
    const double form_h = d_h * std::exp(-omega_si * omega_si * a_h * a_h / (4.0 * c * c));
    const double coupling = form_e - form_h;

    const double denom = 4.0 * pi * pi * spec.density_kg_m3 * hbar_si * std::pow(c, 5);
    const double j_si = omega_si * omega_si * omega_si * coupling * coupling / denom;
    return spec.coupling_scale * j_si * 1e-12;  // 1/s -> 1/ps
}

double spectral_cutoff(const PhononSpec& spec) {
    // The squared Gaussian form factor decays on the scale 2c/a; beyond
    // ~8 of those J is below 1e-50 of its peak.
    const double c_nm_ps = spec.sound_velocity_m_s * 1e-3;
    const double a_min = std::min(spec.a_e_nm, spec.a_h_nm);
    return 16.0 * c_nm_ps / a_min;
}

Complex bath_correlation(const PhononSpec& spec, double t_ps, double rel_tol) {
    validate(spec);
    if (spec.coupling_scale == 0.0) return 0.0;
    const double t = std::abs(t_ps);
    const double wmax = spectral_cutoff(spec);
    // C decays superexponentially, so the error target is relative to the
    // t = 0 scale (a positive, oscillation-free integral).
    const double scale = integrate_adaptive_gk(
        [&](double w) { return spectral_density(spec, w) * thermal_coth(w, spec.temperature_k); },
        0.0, wmax, 1e-10, 0.0, 2000);
    const Complex value = integrate_adaptive_gk(
        [&](double w) -> Complex {
            const double j = spectral_density(spec, w);
            return j * Complex(thermal_coth(w, spec.temperature_k) * std::cos(w * t),
                               -std::sin(w * t));
        },
        0.0, wmax, rel_tol, rel_tol * scale, 20000);
    return t_ps >= 0.0 ? value : std::conj(value);
}

Complex ibm_decoherence(const PhononSpec& spec, double t_ps, double rel_tol) {
    validate(spec);
    if (t_ps < 0.0)
        throw std::invalid_argument("ibm_decoherence: t must be >= 0");
    if (spec.coupling_scale == 0.0 || t_ps == 0.0) return 0.0;
    const double wmax = spectral_cutoff(spec);
    return integrate_adaptive_gk(
        [&](double w) -> Complex {
            const double j_w2 = spectral_density(spec, w) / (w * w);
            const double coth = thermal_coth(w, spec.temperature_k);
            return j_w2 * Complex(coth * (1.0 - std::cos(w * t_ps)),
                                  std::sin(w * t_ps) - w * t_ps);
        },
        0.0, wmax, rel_tol, 1e-14, 20000);
}

}  // namespace qdcav
