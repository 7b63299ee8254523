#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace qdcav {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Hilbert space of one two-level quantum dot coupled to one cavity mode
// truncated at n_max photons. Basis ordering is QD-major:
//   |G0>, |G1>, ..., |G n_max>, |X0>, ..., |X n_max>
// so that the QD lowering operator is a single off-diagonal block.
struct SystemDims {
    int n_max = 2;

    explicit SystemDims(int n = 2) : n_max(n) {
        if (n_max < 1) throw std::invalid_argument("SystemDims: n_max must be >= 1");
    }

    int cavity_dim() const { return n_max + 1; }
    int dim() const { return 2 * (n_max + 1); }

    // S = 0 for |G>, 1 for |X>
    int index(int s, int n) const { return s * cavity_dim() + n; }
    int qd_of(int idx) const { return idx / cavity_dim(); }
    int photon_of(int idx) const { return idx % cavity_dim(); }
};

// |S n> basis ket
Vector basis_state(const SystemDims& dims, int s, int n);

// sigma = |G><X| (x) identity on the cavity
Matrix qd_sigma(const SystemDims& dims);

// Photon annihilation: a |S,n> = sqrt(n) |S,n-1>
Matrix cavity_a(const SystemDims& dims);

// a^dagger a
Matrix cavity_number(const SystemDims& dims);

// sigma^dagger sigma = |X><X| (x) identity
Matrix qd_excited_projector(const SystemDims& dims);

Matrix identity(const SystemDims& dims);

// rho_nm = sum_S <Sn| rho |Sm>, (n_max+1) x (n_max+1)
Matrix partial_trace_qd(const Matrix& rho, const SystemDims& dims);

// rho_SS' = sum_n <Sn| rho |S'n>, 2 x 2 with rows/cols ordered (G, X)
Eigen::Matrix2cd partial_trace_cavity(const Matrix& rho, const SystemDims& dims);

// Diagnostics for a would-be density matrix. All defects are >= 0 except
// min_eigenvalue, which is negative when the matrix fails positivity.
struct DensityDiagnostics {
    double hermiticity_defect = 0.0;  // max |rho - rho^dagger|
    double trace_defect = 0.0;        // |tr(rho) - 1|
    double min_eigenvalue = 0.0;
    bool hermitian_ok = true;
    bool trace_ok = true;
    bool positive_ok = true;

    bool ok() const { return hermitian_ok && trace_ok && positive_ok; }
};

DensityDiagnostics validate_density(const Matrix& rho, double tol);

}  // namespace qdcav
