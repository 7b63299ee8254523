#pragma once

#include "qdcav/drive.hpp"
#include "qdcav/hilbert.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qdcav {

struct LossRates {
    double gamma = 1e-3;               // radiative decay, 1/ps
    double kappa = 0.1 / 0.6582119569; // cavity loss, 1/ps (hbar*kappa = 0.1 meV)

    static LossRates from_energies(double hbar_gamma_mev, double hbar_kappa_mev);
};

void validate(const LossRates& losses);

struct SolverConfig {
    double t_start = -10.0;
    double t_end = 40.0;
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step_pulse = 0.01;  // cap while any pulse is active, ps
    double max_step_tail = 0.1;    // cap outside pulse support, ps
    double fixed_dt = 0.0;         // > 0 selects fixed-step integration
    double output_stride = 0.05;   // ps
    int positivity_stride = 10;    // eigen-check every n-th output; 0 disables
    double validity_tol = 1e-6;
};

// Enforces the step caps against the drive: detuned lasers oscillate on the
// ~10 fs scale, so the in-pulse cap must stay at or below 0.02 ps.
void validate(const SolverConfig& solver, const DriveConfig& drive);

// Reduced time series produced by the propagators.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::Matrix2cd> qd;  // reduced QD matrices, (G, X) ordering
    std::vector<Matrix> cavity;        // reduced cavity matrices
    std::vector<double> photon_number; // <a^dag a>

    std::size_t size() const { return times.size(); }
    double rho_xx(std::size_t i) const { return qd[i](1, 1).real(); }
    double rho_gg(std::size_t i) const { return qd[i](0, 0).real(); }
    Complex rho_gx(std::size_t i) const { return qd[i](0, 1); }
    Complex rho_01(std::size_t i) const { return cavity[i](0, 1); }
    double rho_nn(std::size_t i, int n) const { return cavity[i](n, n).real(); }
};

// delta (O rho O^dag - 1/2 {rho, O^dag O}); traceless by construction
Matrix dissipator(const Matrix& op, double rate, const Matrix& rho);

// Master equation right-hand side with the static operators cached, so the
// hot loop only rebuilds the scalar drive coefficient per stage time.
class MasterEquation {
  public:
    MasterEquation(const DriveConfig& cfg, const CavitySpec& cav,
                   const SystemDims& dims, const LossRates& losses);

    const SystemDims& dims() const { return dims_; }
    Complex raising_coeff(double t) const;  // coefficient of sigma^dagger, meV
    Matrix hamiltonian(double t) const;     // total H(t), meV

    // out = d rho / dt
    void apply(double t, const Matrix& rho, Matrix& out) const;
    Matrix apply(double t, const Matrix& rho) const;

    // Batched form: columns of y are column-major vectorised density
    // matrices; out must have the shape of y.
    void apply_vec(double t, const Matrix& y, Matrix& out) const;

  private:
    DriveConfig cfg_;
    SystemDims dims_;
    LossRates losses_;
    Matrix jc_, sigma_, sigma_dag_, sig_dag_sig_, a_, a_dag_, a_dag_a_;
};

// -(i/hbar) [H(t), rho] + L_{sigma,gamma}[rho] + L_{a,kappa}[rho]
Matrix master_rhs(double t, const Matrix& rho, const DriveConfig& cfg,
                  const CavitySpec& cav, const SystemDims& dims, const LossRates& losses);

// Trace/Hermiticity (and optionally positivity) guard used by the
// propagators; throws NumericalError with diagnostics on violation.
void check_state_validity(const Matrix& rho, double t, double tol, bool check_positivity);

// Phonon-free propagation of the master equation. The initial state
// defaults to |G0><G0|. Deterministic for identical inputs.
Trajectory propagate(const DriveConfig& cfg, const CavitySpec& cav,
                     const LossRates& losses, const SolverConfig& solver,
                     const Matrix* initial = nullptr);

// CSV with header
//   t,rho_GG,rho_XX,re_rho_GX,im_rho_GX,rho_00,rho_11,rho_22,re_rho_01,im_rho_01,n_photon
// Values are written with enough digits to round-trip exactly.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace qdcav
