#pragma once

#include "qdcav/hilbert.hpp"

#include <complex>
#include <vector>

namespace qdcav {

// Longitudinal-acoustic phonon environment of the exciton, coupled through
// the pure-dephasing operator sigma^dag sigma. Material defaults are
// standard GaAs deformation-potential values; they are a calibration point
// and fully configurable.
struct PhononSpec {
    bool enabled = true;
    double temperature_k = 4.2;
    double a_e_nm = 3.0;             // electron localisation radius
    double a_h_nm = 3.0 / 1.15;      // hole localisation radius
    double d_e_ev = 7.0;             // electron deformation potential
    double d_h_ev = -3.5;            // hole deformation potential
    double density_kg_m3 = 5370.0;
    double sound_velocity_m_s = 5110.0;
    double coupling_scale = 1.0;     // multiplies J(omega); 0 switches the bath off

    // influence-functional grid
    double dt_ps = 0.05;             // process-tensor step
    double memory_ps = 8.0;          // bath memory cutoff t_mem

    int memory_steps() const;        // n_c = round(t_mem / dt)
};

void validate(const PhononSpec& spec);

// Superohmic deformation-potential spectral density, 1/ps, for
// omega in rad/ps:
//   J(w) = w^3/(4 pi^2 rho hbar c^5) (D_e e^{-w^2 a_e^2/(4c^2)}
//                                     - D_h e^{-w^2 a_h^2/(4c^2)})^2
double spectral_density(const PhononSpec& spec, double omega_rad_ps);

// Frequency above which J is negligible; used as quadrature upper limit.
double spectral_cutoff(const PhononSpec& spec);

// C(t) = int dw J(w) [coth(hbar w / 2 kB T) cos(wt) - i sin(wt)], 1/ps^2.
// Satisfies C(-t) = conj(C(t)).
Complex bath_correlation(const PhononSpec& spec, double t_ps, double rel_tol = 1e-8);

// Independent-boson decoherence exponent
//   Gamma(t) = int dw J(w)/w^2 [coth(hbar w/2 kB T)(1 - cos wt)
//                               + i sin wt - i w t],
// so an undriven, cavity-decoupled coherence obeys
// |rho_GX(t)| = |rho_GX(0)| e^{-Re Gamma(t)}.
Complex ibm_decoherence(const PhononSpec& spec, double t_ps, double rel_tol = 1e-10);

}  // namespace qdcav
