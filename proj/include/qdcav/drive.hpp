#pragma once

#include "qdcav/hilbert.hpp"

#include <string_view>
#include <vector>

namespace qdcav {

// One Gaussian laser pulse in the frame rotating at the exciton frequency.
// detuning_mev is the laser-exciton energy difference; negative values are
// red-detuned lasers.
struct PulseSpec {
    double area_rad = 0.0;    // integrated Rabi angle
    double sigma_ps = 2.0;    // Gaussian duration
    double detuning_mev = 0.0;
    double delay_ps = 0.0;    // envelope centre t0
    double phase_rad = 0.0;   // carrier phase
};

// One entry drives resonant excitation, two entries the swing-up scheme.
struct DriveConfig {
    std::vector<PulseSpec> pulses;
};

struct CavitySpec {
    double coupling_mev = 0.05;   // g
    double detuning_mev = 0.0;    // cavity-exciton detuning
    int n_max = 2;
};

void validate(const PulseSpec& p);
void validate(const DriveConfig& cfg);
void validate(const CavitySpec& cav);

// Instantaneous Rabi frequency Omega(t) = Theta/(sqrt(2 pi) sigma)
// * exp(-(t-t0)^2 / (2 sigma^2)), in 1/ps. Integrates to the pulse area.
double envelope(const PulseSpec& p, double t);

// True while any envelope is non-negligible (within 6 sigma of a centre).
bool pulse_active(const DriveConfig& cfg, double t);

// sum_i -(hbar Omega_i(t)/2) (e^{-i(w_i t + phi_i)} sigma^dag + h.c.), meV
Matrix drive_hamiltonian(const DriveConfig& cfg, const SystemDims& dims, double t);

// hbar w_CX a^dag a + hbar g (a sigma^dag + a^dag sigma), meV
Matrix jc_hamiltonian(const CavitySpec& cav, const SystemDims& dims);

Matrix total_hamiltonian(const DriveConfig& cfg, const CavitySpec& cav,
                         const SystemDims& dims, double t);

// Named drive presets resolvable from the CLI.
DriveConfig super_paper_drive();
DriveConfig re_paper_drive();
bool is_preset_name(std::string_view name);
DriveConfig preset_drive(std::string_view name);

}  // namespace qdcav
