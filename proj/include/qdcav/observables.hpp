#pragma once

#include "qdcav/dynamics.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qdcav {

// Time-integrated figures of merit of one trajectory; the integrals carry
// units of ps (trapezoidal rule over the output grid).
struct MetricsRecord {
    double rho01_int = 0.0;   // int |rho_01| dt
    double rho11_int = 0.0;   // int rho_11 dt
    double rhoGX_int = 0.0;   // int |rho_GX| dt
    double rhoXX_int = 0.0;   // int rho_XX dt
    double photon_int = 0.0;  // int <a^dag a> dt
    double rho22_rho11_ratio = 0.0;  // max_t rho_22 / max_t rho_11
    bool ratio_degenerate = false;   // 0/0 reported as 0 with this flag
    bool tail_warning = false;       // emission not finished at t_end
    double tail_fraction = 0.0;      // estimated missing fraction of rho01_int
};

// The trajectory should span the full emission (|rho_01| down to 1e-4 of its
// peak at t_end); otherwise tail_warning is set and tail_fraction estimates
// the missing weight from the terminal decay rate.
MetricsRecord integrate_metrics(const Trajectory& traj);

// Beamsplitter output intensities when a photon interferes with a delayed
// one from the same source: N_{c,d} = rho11 (1 +- (|rho01|^2/rho11) cos dphi).
// Callers choose whether rho11/|rho01| are instantaneous or time-integrated.
struct HOMPrediction {
    double n_c = 0.0;
    double n_d = 0.0;
    double phase_diff = 0.0;
};
HOMPrediction hom_intensities(double rho11, double abs_rho01, double phase_diff);

// Photon coherence from the electronic coherence through the cavity memory
// kernel:
//   rho01(t) = -i g int_{-inf}^t rho_GX(t') e^{(-i w_CX - kappa/2)(t - t')} dt'
// evaluated by the recursive exponential-trapezoidal update on a uniform
// grid. g and the cavity detuning are energies (meV), kappa a rate (1/ps).
std::vector<Complex> kernel_model_rho01(std::span<const double> times,
                                        std::span<const Complex> rho_gx,
                                        double coupling_mev, double kappa,
                                        double cavity_detuning_mev);

// max_t rho_22 / max_t rho_11; requires n_max >= 2. A vacuum-only
// trajectory reports 0 with *degenerate set.
double truncation_check(const Trajectory& traj, bool* degenerate = nullptr);

// One CSV row with the fixed header
//   rho01_int,rho11_int,rhoGX_int,rhoXX_int,n_int,rho22_rho11_ratio
void write_metrics_csv(std::ostream& out, const MetricsRecord& m);
void write_metrics_csv(const std::string& path, const MetricsRecord& m);

}  // namespace qdcav
