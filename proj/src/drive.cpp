#include "qdcav/drive.hpp"

#include "qdcav/constants.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qdcav {

void validate(const PulseSpec& p) {
    if (!(p.sigma_ps > 0.0))
        throw std::invalid_argument("PulseSpec: sigma must be positive");
    if (p.area_rad < 0.0)
        throw std::invalid_argument("PulseSpec: area must be non-negative");
}

void validate(const DriveConfig& cfg) {
    if (cfg.pulses.empty())
        throw std::invalid_argument("DriveConfig: at least one pulse required");
    for (const auto& p : cfg.pulses) validate(p);
}

void validate(const CavitySpec& cav) {
    if (cav.coupling_mev < 0.0)
        throw std::invalid_argument("CavitySpec: coupling must be non-negative");
    if (cav.n_max < 1)
        throw std::invalid_argument("CavitySpec: n_max must be >= 1");
}

double envelope(const PulseSpec& p, double t) {
    const double x = (t - p.delay_ps) / p.sigma_ps;
    return p.area_rad / (std::sqrt(2.0 * pi) * p.sigma_ps) * std::exp(-0.5 * x * x);
}

bool pulse_active(const DriveConfig& cfg, double t) {
    for (const auto& p : cfg.pulses)
        if (p.area_rad > 0.0 && std::abs(t - p.delay_ps) < 6.0 * p.sigma_ps) return true;
    return false;
}

Matrix drive_hamiltonian(const DriveConfig& cfg, const SystemDims& dims, double t) {
    Matrix h = Matrix::Zero(dims.dim(), dims.dim());
    Complex raising_coeff = 0.0;  // coefficient of sigma^dagger
    for (const auto& p : cfg.pulses) {
        const double omega = angular_frequency(p.detuning_mev);
        const double amp = -0.5 * hbar_mev_ps * envelope(p, t);
        raising_coeff += amp * std::exp(Complex(0.0, -(omega * t + p.phase_rad)));
    }
    for (int n = 0; n <= dims.n_max; ++n) {
        h(dims.index(1, n), dims.index(0, n)) = raising_coeff;
        h(dims.index(0, n), dims.index(1, n)) = std::conj(raising_coeff);
    }
    return h;
}

Matrix jc_hamiltonian(const CavitySpec& cav, const SystemDims& dims) {
    Matrix h = cav.detuning_mev * cavity_number(dims);
    const Matrix a = cavity_a(dims);
    const Matrix sigma = qd_sigma(dims);
    h += cav.coupling_mev * (a * sigma.adjoint() + a.adjoint() * sigma);
    return h;
}

Matrix total_hamiltonian(const DriveConfig& cfg, const CavitySpec& cav,
                         const SystemDims& dims, double t) {
    return drive_hamiltonian(cfg, dims, t) + jc_hamiltonian(cav, dims);
}

DriveConfig super_paper_drive() {
    DriveConfig cfg;
    cfg.pulses.push_back({15.95 * pi, 2.0, -2.06, 0.0, 0.0});
    cfg.pulses.push_back({15.78 * pi, 2.0, -5.08, 0.0, 0.0});
    return cfg;
}

DriveConfig re_paper_drive() {
    DriveConfig cfg;
    cfg.pulses.push_back({pi, 2.0, 0.0, 0.0, 0.0});
    return cfg;
}

bool is_preset_name(std::string_view name) {
    return name == "super-paper" || name == "re-paper";
}

DriveConfig preset_drive(std::string_view name) {
    if (name == "super-paper") return super_paper_drive();
    if (name == "re-paper") return re_paper_drive();
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected super-paper or re-paper)");
}

}  // namespace qdcav
