#include "qdcav/dynamics.hpp"

#include "qdcav/constants.hpp"
#include "qdcav/errors.hpp"
#include "qdcav/integrator.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qdcav {

LossRates LossRates::from_energies(double hbar_gamma_mev, double hbar_kappa_mev) {
    return {rate_from_energy(hbar_gamma_mev), rate_from_energy(hbar_kappa_mev)};
}

void validate(const LossRates& losses) {
    if (losses.gamma < 0.0 || losses.kappa < 0.0)
        throw std::invalid_argument("LossRates: rates must be non-negative");
}

void validate(const SolverConfig& solver, const DriveConfig& drive) {
    if (!(solver.t_end > solver.t_start))
        throw std::invalid_argument("SolverConfig: t_end must exceed t_start");
    if (!(solver.output_stride > 0.0))
        throw std::invalid_argument("SolverConfig: output_stride must be positive");
    if (!(solver.max_step_pulse > 0.0) || !(solver.max_step_tail > 0.0))
        throw std::invalid_argument("SolverConfig: step caps must be positive");
    if (solver.fixed_dt < 0.0)
        throw std::invalid_argument("SolverConfig: fixed_dt must be >= 0");
    bool detuned = false;
    for (const auto& p : drive.pulses)
        if (p.detuning_mev != 0.0 && p.area_rad > 0.0) detuned = true;
    if (detuned && solver.max_step_pulse > 0.02)
        throw std::invalid_argument(
            "SolverConfig: max_step_pulse must be <= 0.02 ps with detuned lasers");
}

Matrix dissipator(const Matrix& op, double rate, const Matrix& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols() || rho.rows() != rho.cols())
        throw std::invalid_argument("dissipator: dimension mismatch");
    const Matrix opd_op = op.adjoint() * op;
    return rate * (op * rho * op.adjoint() - 0.5 * (rho * opd_op + opd_op * rho));
}

MasterEquation::MasterEquation(const DriveConfig& cfg, const CavitySpec& cav,
                               const SystemDims& dims, const LossRates& losses)
    : cfg_(cfg), dims_(dims), losses_(losses) {
    jc_ = jc_hamiltonian(cav, dims);
    sigma_ = qd_sigma(dims);
    sigma_dag_ = sigma_.adjoint();
    sig_dag_sig_ = sigma_dag_ * sigma_;
    a_ = cavity_a(dims);
    a_dag_ = a_.adjoint();
    a_dag_a_ = a_dag_ * a_;
}

Complex MasterEquation::raising_coeff(double t) const {
    Complex c = 0.0;
    for (const auto& p : cfg_.pulses) {
        const double omega = angular_frequency(p.detuning_mev);
        c += -0.5 * hbar_mev_ps * envelope(p, t) *
             std::exp(Complex(0.0, -(omega * t + p.phase_rad)));
    }
    return c;
}

Matrix MasterEquation::hamiltonian(double t) const {
    const Complex c = raising_coeff(t);
    Matrix h = jc_;
    h += c * sigma_dag_;
    h += std::conj(c) * sigma_;
    return h;
}

void MasterEquation::apply(double t, const Matrix& rho, Matrix& out) const {
    const Matrix h = hamiltonian(t);
    out = Complex(0.0, -1.0 / hbar_mev_ps) * (h * rho - rho * h);
    if (losses_.gamma != 0.0)
        out += losses_.gamma * (sigma_ * rho * sigma_dag_ -
                                0.5 * (rho * sig_dag_sig_ + sig_dag_sig_ * rho));
    if (losses_.kappa != 0.0)
        out += losses_.kappa *
               (a_ * rho * a_dag_ - 0.5 * (rho * a_dag_a_ + a_dag_a_ * rho));
}

Matrix MasterEquation::apply(double t, const Matrix& rho) const {
    Matrix out;
    apply(t, rho, out);
    return out;
}

void MasterEquation::apply_vec(double t, const Matrix& y, Matrix& out) const {
    const int d = dims_.dim();
    const Matrix h = hamiltonian(t);
    Matrix rho(d, d), drho(d, d);
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        rho = Eigen::Map<const Matrix>(y.col(c).data(), d, d);
        drho.noalias() = Complex(0.0, -1.0 / hbar_mev_ps) * (h * rho - rho * h);
        if (losses_.gamma != 0.0)
            drho += losses_.gamma * (sigma_ * rho * sigma_dag_ -
                                     0.5 * (rho * sig_dag_sig_ + sig_dag_sig_ * rho));
        if (losses_.kappa != 0.0)
            drho += losses_.kappa *
                    (a_ * rho * a_dag_ - 0.5 * (rho * a_dag_a_ + a_dag_a_ * rho));
        Eigen::Map<Matrix>(out.col(c).data(), d, d) = drho;
    }
}

void check_state_validity(const Matrix& rho, double t, double tol, bool check_positivity) {
    const double trace_defect = std::abs(rho.trace() - Complex(1.0));
    const double herm_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    double min_eig = 0.0;
    if (check_positivity) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                                 Eigen::EigenvaluesOnly);
        min_eig = es.eigenvalues().minCoeff();
    }
    if (trace_defect > tol || herm_defect > tol || min_eig < -tol) {
        char buf[192];
        std::snprintf(buf, sizeof(buf),
                      "state validity violated at t = %.6g ps: trace defect %.3g, "
                      "hermiticity defect %.3g, min eigenvalue %.3g",
                      t, trace_defect, herm_defect, min_eig);
        throw NumericalError(buf);
    }
}

Matrix master_rhs(double t, const Matrix& rho, const DriveConfig& cfg,
                  const CavitySpec& cav, const SystemDims& dims, const LossRates& losses) {
    MasterEquation eq(cfg, cav, dims, losses);
    return eq.apply(t, rho);
}

Trajectory propagate(const DriveConfig& cfg, const CavitySpec& cav,
                     const LossRates& losses, const SolverConfig& solver,
                     const Matrix* initial) {
    validate(cfg);
    validate(cav);
    validate(losses);
    validate(solver, cfg);

    const SystemDims dims(cav.n_max);
    Matrix rho;
    if (initial) {
        if (initial->rows() != dims.dim() || initial->cols() != dims.dim())
            throw std::invalid_argument("propagate: initial state dimension mismatch");
        rho = *initial;
    } else {
        rho = Matrix::Zero(dims.dim(), dims.dim());
        rho(dims.index(0, 0), dims.index(0, 0)) = 1.0;
    }

    const MasterEquation liouville(cfg, cav, dims, losses);
    const Matrix number_op = cavity_number(dims);

    StepControl ctl;
    ctl.rtol = solver.rtol;
    ctl.atol = solver.atol;
    ctl.fixed_dt = solver.fixed_dt;
    const auto cap = [&](double t) {
        return pulse_active(cfg, t) ? solver.max_step_pulse : solver.max_step_tail;
    };
    const auto rhs = [&](double t, const Matrix& y) { return liouville.apply(t, y); };

    const auto n_out = static_cast<std::size_t>(
        std::floor((solver.t_end - solver.t_start) / solver.output_stride + 1e-9));

    Trajectory traj;
    traj.times.reserve(n_out + 1);
    traj.qd.reserve(n_out + 1);
    traj.cavity.reserve(n_out + 1);
    traj.photon_number.reserve(n_out + 1);

    const auto record = [&](double t, std::size_t out_index) {
        const bool eig_check = solver.positivity_stride > 0 &&
                               out_index % static_cast<std::size_t>(solver.positivity_stride) == 0;
        check_state_validity(rho, t, solver.validity_tol, eig_check);
        traj.times.push_back(t);
        traj.qd.push_back(partial_trace_cavity(rho, dims));
        traj.cavity.push_back(partial_trace_qd(rho, dims));
        traj.photon_number.push_back((rho * number_op).trace().real());
    };

    record(solver.t_start, 0);
    double t_prev = solver.t_start;
    for (std::size_t j = 1; j <= n_out; ++j) {
        const double t_j = solver.t_start + double(j) * solver.output_stride;
        integrate_adaptive(rhs, rho, t_prev, t_j, ctl, cap);
        record(t_j, j);
        t_prev = t_j;
    }
    return traj;
}

namespace {

void append_field(std::string& line, double v, bool first = false) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (!first) line += ',';
    line += buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,rho_GG,rho_XX,re_rho_GX,im_rho_GX,rho_00,rho_11,rho_22,"
           "re_rho_01,im_rho_01,n_photon\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const int nc = static_cast<int>(traj.cavity[i].rows());
        std::string line;
        append_field(line, traj.times[i], true);
        append_field(line, traj.rho_gg(i));
        append_field(line, traj.rho_xx(i));
        append_field(line, traj.rho_gx(i).real());
        append_field(line, traj.rho_gx(i).imag());
        append_field(line, traj.rho_nn(i, 0));
        append_field(line, nc > 1 ? traj.rho_nn(i, 1) : 0.0);
        append_field(line, nc > 2 ? traj.rho_nn(i, 2) : 0.0);
        append_field(line, traj.rho_01(i).real());
        append_field(line, traj.rho_01(i).imag());
        append_field(line, traj.photon_number[i]);
        out << line << '\n';
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    write_trajectory_csv(f, traj);
}

Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trajectory CSV: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 11> v{};
        std::size_t pos = 0;
        for (int col = 0; col < 11; ++col) {
            const std::size_t next = line.find(',', pos);
            const std::string field = line.substr(pos, next == std::string::npos
                                                           ? std::string::npos
                                                           : next - pos);
            try {
                v[col] = std::stod(field);
            } catch (const std::exception&) {
                throw ConfigError("trajectory CSV: bad numeric field '" + field + "'");
            }
            if (next == std::string::npos && col != 10)
                throw ConfigError("trajectory CSV: expected 11 columns");
            pos = next + 1;
        }
        traj.times.push_back(v[0]);
        Eigen::Matrix2cd qd;
        qd << Complex(v[1], 0.0), Complex(v[3], v[4]),
              Complex(v[3], -v[4]), Complex(v[2], 0.0);
        traj.qd.push_back(qd);
        Matrix cav = Matrix::Zero(3, 3);
        cav(0, 0) = v[5];
        cav(1, 1) = v[6];
        cav(2, 2) = v[7];
        cav(0, 1) = Complex(v[8], v[9]);
        cav(1, 0) = Complex(v[8], -v[9]);
        traj.cavity.push_back(cav);
        traj.photon_number.push_back(v[10]);
    }
    return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open trajectory CSV '" + path + "'");
    return read_trajectory_csv(f);
}

}  // namespace qdcav
