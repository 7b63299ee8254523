#include "qdcav/hilbert.hpp"

#include <doctest.h>

#include <random>

using namespace qdcav;

namespace {

Matrix random_density(const SystemDims& dims, std::mt19937& rng) {
    std::normal_distribution<double> normal;
    Matrix g(dims.dim(), dims.dim());
    for (int i = 0; i < dims.dim(); ++i)
        for (int j = 0; j < dims.dim(); ++j) g(i, j) = Complex(normal(rng), normal(rng));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    return rho;
}

}  // namespace

TEST_CASE("dimensions and basis ordering") {
    SystemDims dims(2);
    CHECK(dims.dim() == 6);
    CHECK(dims.index(0, 0) == 0);
    CHECK(dims.index(0, 2) == 2);
    CHECK(dims.index(1, 0) == 3);
    CHECK_THROWS_AS(SystemDims(0), std::invalid_argument);
}

TEST_CASE("qd_sigma maps |Xn> to |Gn> and annihilates |Gn>") {
    SystemDims dims(1);
    Matrix sigma = qd_sigma(dims);

    CHECK((sigma * basis_state(dims, 1, 0) - basis_state(dims, 0, 0)).norm() == 0.0);
    CHECK((sigma * basis_state(dims, 1, 1) - basis_state(dims, 0, 1)).norm() == 0.0);
    CHECK((sigma * basis_state(dims, 0, 0)).norm() == 0.0);
    CHECK((sigma * basis_state(dims, 0, 1)).norm() == 0.0);

    // exactly two unit entries
    int units = 0, nonzero = 0;
    for (int i = 0; i < dims.dim(); ++i)
        for (int j = 0; j < dims.dim(); ++j) {
            if (std::abs(sigma(i, j)) != 0.0) ++nonzero;
            if (sigma(i, j) == Complex(1.0)) ++units;
        }
    CHECK(units == 2);
    CHECK(nonzero == 2);

    CHECK((sigma * sigma).norm() == 0.0);
    CHECK(std::abs(sigma.trace()) == 0.0);

    // sigma^dag sigma projects onto the X subspace, and together with
    // sigma sigma^dag resolves the identity
    Matrix proj_x = sigma.adjoint() * sigma;
    CHECK((proj_x - qd_excited_projector(dims)).norm() == 0.0);
    CHECK((proj_x + sigma * sigma.adjoint() - identity(dims)).norm() == 0.0);
}

TEST_CASE("cavity_a ladder structure") {
    SystemDims dims(2);
    Matrix a = cavity_a(dims);

    CHECK((a * basis_state(dims, 0, 1) - basis_state(dims, 0, 0)).norm() == 0.0);
    CHECK((a * basis_state(dims, 0, 0)).norm() == 0.0);
    CHECK((a * basis_state(dims, 1, 0)).norm() == 0.0);

    // <m|a|n> = sqrt(n) delta_{m,n-1}
    for (int s = 0; s < 2; ++s)
        for (int n = 1; n <= dims.n_max; ++n)
            CHECK(a(dims.index(s, n - 1), dims.index(s, n)) ==
                  Complex(std::sqrt(double(n))));

    // number operator eigenvalues {0,1,2}, each twice
    Matrix num = a.adjoint() * a;
    CHECK((num - cavity_number(dims)).norm() < 1e-14);
    std::vector<double> diag;
    for (int i = 0; i < dims.dim(); ++i) diag.push_back(num(i, i).real());
    std::sort(diag.begin(), diag.end());
    const std::vector<double> expected{0, 0, 1, 1, 2, 2};
    for (int i = 0; i < dims.dim(); ++i)
        CHECK(diag[std::size_t(i)] == doctest::Approx(expected[std::size_t(i)]));

    // [a, a^dag] = 1 up to the truncation correction on the top level
    Matrix comm = a * a.adjoint() - a.adjoint() * a;
    for (int s = 0; s < 2; ++s) {
        for (int n = 0; n < dims.n_max; ++n)
            CHECK(std::abs(comm(dims.index(s, n), dims.index(s, n)) - Complex(1.0)) < 1e-14);
        CHECK(std::abs(comm(dims.index(s, dims.n_max), dims.index(s, dims.n_max)) +
                       Complex(double(dims.n_max))) < 1e-14);
    }
}

TEST_CASE("partial trace over the QD") {
    SystemDims dims(2);

    SUBCASE("product state |G0>") {
        Matrix rho = Matrix::Zero(6, 6);
        rho(0, 0) = 1.0;
        Matrix cav = partial_trace_qd(rho, dims);
        CHECK(std::abs(cav(0, 0) - 1.0) == 0.0);
        CHECK(std::abs(cav(1, 1)) == 0.0);
        CHECK(std::abs(cav(2, 2)) == 0.0);
    }

    SUBCASE("classically correlated state has no photon coherence") {
        Matrix rho = Matrix::Zero(6, 6);
        rho(dims.index(0, 0), dims.index(0, 0)) = 0.5;
        rho(dims.index(1, 1), dims.index(1, 1)) = 0.5;
        Matrix cav = partial_trace_qd(rho, dims);
        CHECK(cav(0, 0).real() == doctest::Approx(0.5));
        CHECK(cav(1, 1).real() == doctest::Approx(0.5));
        CHECK(std::abs(cav(0, 1)) == 0.0);
    }

    SUBCASE("pure product state keeps coherence") {
        Vector psi = (basis_state(dims, 0, 0) + basis_state(dims, 0, 1)) / std::sqrt(2.0);
        Matrix rho = psi * psi.adjoint();
        Matrix cav = partial_trace_qd(rho, dims);
        CHECK(cav(0, 1).real() == doctest::Approx(0.5));
    }

    SUBCASE("dimension mismatch rejected") {
        Matrix bad = Matrix::Zero(4, 4);
        CHECK_THROWS_AS(partial_trace_qd(bad, dims), std::invalid_argument);
    }
}

TEST_CASE("partial trace over the cavity") {
    SystemDims dims(2);

    SUBCASE("|X0> gives rho_XX = 1") {
        Matrix rho = Matrix::Zero(6, 6);
        rho(dims.index(1, 0), dims.index(1, 0)) = 1.0;
        auto qd = partial_trace_cavity(rho, dims);
        CHECK(qd(1, 1).real() == doctest::Approx(1.0));
        CHECK(qd(0, 0).real() == doctest::Approx(0.0));
    }

    SUBCASE("coherence hidden in entanglement") {
        Vector psi = (basis_state(dims, 0, 1) + basis_state(dims, 1, 0)) / std::sqrt(2.0);
        Matrix rho = psi * psi.adjoint();
        auto qd = partial_trace_cavity(rho, dims);
        CHECK(std::abs(qd(0, 1)) == 0.0);
    }

    SUBCASE("same-photon-number superposition keeps coherence") {
        Vector psi = (basis_state(dims, 0, 0) + basis_state(dims, 1, 0)) / std::sqrt(2.0);
        Matrix rho = psi * psi.adjoint();
        auto qd = partial_trace_cavity(rho, dims);
        CHECK(qd(0, 1).real() == doctest::Approx(0.5));
    }
}

TEST_CASE("partial traces preserve the trace") {
    SystemDims dims(2);
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix rho = random_density(dims, rng);
        CHECK(std::abs(partial_trace_qd(rho, dims).trace() - Complex(1.0)) < 1e-14);
        CHECK(std::abs(partial_trace_cavity(rho, dims).trace() - Complex(1.0)) < 1e-14);
    }
}

TEST_CASE("purity bound of 2x2 principal submatrices") {
    // any 2x2 principal submatrix of a PSD matrix is PSD, so
    // |rho_01|^2 <= rho_00 rho_11 for every reduced state
    SystemDims dims(2);
    std::mt19937 rng(777);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix rho = random_density(dims, rng);
        Matrix cav = partial_trace_qd(rho, dims);
        auto qd = partial_trace_cavity(rho, dims);
        CHECK(std::norm(cav(0, 1)) <= cav(0, 0).real() * cav(1, 1).real() + 1e-12);
        CHECK(std::norm(qd(0, 1)) <= qd(0, 0).real() * qd(1, 1).real() + 1e-12);
    }
}

TEST_CASE("validate_density diagnostics") {
    SystemDims dims(2);

    SUBCASE("maximally mixed state is clean") {
        Matrix rho = identity(dims) / 6.0;
        auto d = validate_density(rho, 1e-12);
        CHECK(d.hermiticity_defect == 0.0);
        CHECK(d.trace_defect < 1e-15);
        CHECK(d.min_eigenvalue == doctest::Approx(1.0 / 6.0));
        CHECK(d.ok());
    }

    SUBCASE("trace violation flagged") {
        Matrix rho = identity(dims) / 6.0;
        rho(0, 0) += 0.01;
        auto d = validate_density(rho, 1e-3);
        CHECK_FALSE(d.trace_ok);
        CHECK(d.hermitian_ok);
        CHECK_FALSE(d.ok());
    }

    SUBCASE("negativity flagged") {
        Matrix rho = Matrix::Zero(6, 6);
        rho(0, 0) = 1.1;
        rho(1, 1) = -0.1;
        auto d = validate_density(rho, 1e-6);
        CHECK_FALSE(d.positive_ok);
        CHECK(d.min_eigenvalue == doctest::Approx(-0.1));
    }
}
