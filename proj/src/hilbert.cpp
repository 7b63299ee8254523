#include "qdcav/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qdcav {

Vector basis_state(const SystemDims& dims, int s, int n) {
    if (s < 0 || s > 1 || n < 0 || n > dims.n_max)
        throw std::invalid_argument("basis_state: index out of range");
    Vector v = Vector::Zero(dims.dim());
    v(dims.index(s, n)) = 1.0;
    return v;
}

Matrix qd_sigma(const SystemDims& dims) {
    Matrix m = Matrix::Zero(dims.dim(), dims.dim());
    for (int n = 0; n <= dims.n_max; ++n)
        m(dims.index(0, n), dims.index(1, n)) = 1.0;  // |Gn><Xn|
    return m;
}

Matrix cavity_a(const SystemDims& dims) {
    Matrix m = Matrix::Zero(dims.dim(), dims.dim());
    for (int s = 0; s < 2; ++s)
        for (int n = 1; n <= dims.n_max; ++n)
            m(dims.index(s, n - 1), dims.index(s, n)) = std::sqrt(double(n));
    return m;
}

Matrix cavity_number(const SystemDims& dims) {
    Matrix m = Matrix::Zero(dims.dim(), dims.dim());
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n <= dims.n_max; ++n)
            m(dims.index(s, n), dims.index(s, n)) = double(n);
    return m;
}

Matrix qd_excited_projector(const SystemDims& dims) {
    Matrix m = Matrix::Zero(dims.dim(), dims.dim());
    for (int n = 0; n <= dims.n_max; ++n)
        m(dims.index(1, n), dims.index(1, n)) = 1.0;
    return m;
}

Matrix identity(const SystemDims& dims) {
    return Matrix::Identity(dims.dim(), dims.dim());
}

Matrix partial_trace_qd(const Matrix& rho, const SystemDims& dims) {
    if (rho.rows() != dims.dim() || rho.cols() != dims.dim())
        throw std::invalid_argument("partial_trace_qd: dimension mismatch");
    const int nc = dims.cavity_dim();
    Matrix out = Matrix::Zero(nc, nc);
    for (int n = 0; n < nc; ++n)
        for (int m = 0; m < nc; ++m)
            for (int s = 0; s < 2; ++s)
                out(n, m) += rho(dims.index(s, n), dims.index(s, m));
    return out;
}

Eigen::Matrix2cd partial_trace_cavity(const Matrix& rho, const SystemDims& dims) {
    if (rho.rows() != dims.dim() || rho.cols() != dims.dim())
        throw std::invalid_argument("partial_trace_cavity: dimension mismatch");
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp)
            for (int n = 0; n <= dims.n_max; ++n)
                out(s, sp) += rho(dims.index(s, n), dims.index(sp, n));
    return out;
}

DensityDiagnostics validate_density(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument("validate_density: matrix must be square");
    DensityDiagnostics d;
    d.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    d.trace_defect = std::abs(rho.trace() - Complex(1.0));
    Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    d.hermitian_ok = d.hermiticity_defect <= tol;
    d.trace_ok = d.trace_defect <= tol;
    d.positive_ok = d.min_eigenvalue >= -tol;
    return d;
}

}  // namespace qdcav
