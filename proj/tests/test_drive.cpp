#include "qdcav/drive.hpp"

#include "qdcav/constants.hpp"

#include <doctest.h>

#include <random>

using namespace qdcav;

TEST_CASE("Gaussian envelope") {
    PulseSpec p{pi, 2.0, 0.0, 0.0, 0.0};

    SUBCASE("peak value") {
        CHECK(envelope(p, 0.0) == doctest::Approx(0.62666).epsilon(1e-4));
        CHECK(envelope(p, 0.0) == doctest::Approx(pi / (std::sqrt(2.0 * pi) * 2.0)));
    }

    SUBCASE("shape ratio at one sigma") {
        CHECK(envelope(p, p.sigma_ps) / envelope(p, 0.0) ==
              doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    }

    SUBCASE("delay shifts the centre") {
        PulseSpec shifted = p;
        shifted.delay_ps = 5.0;
        CHECK(envelope(shifted, 5.0) == doctest::Approx(envelope(p, 0.0)));
    }

    SUBCASE("quadrature recovers the pulse area") {
        // composite Simpson over +-8 sigma
        const double a = -8.0 * p.sigma_ps, b = 8.0 * p.sigma_ps;
        const int n = 4000;
        const double h = (b - a) / n;
        double sum = envelope(p, a) + envelope(p, b);
        for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * envelope(p, a + i * h);
        CHECK(std::abs(sum * h / 3.0 - p.area_rad) < 1e-10);
    }

    SUBCASE("invalid specs rejected") {
        CHECK_THROWS_AS(validate(PulseSpec{pi, 0.0, 0, 0, 0}), std::invalid_argument);
        CHECK_THROWS_AS(validate(PulseSpec{-1.0, 2.0, 0, 0, 0}), std::invalid_argument);
        CHECK_THROWS_AS(validate(DriveConfig{}), std::invalid_argument);
    }
}

TEST_CASE("drive Hamiltonian") {
    SystemDims dims(2);

    SUBCASE("resonant pulse at the centre") {
        DriveConfig cfg;
        cfg.pulses.push_back({pi, 2.0, 0.0, 0.0, 0.0});
        Matrix h = drive_hamiltonian(cfg, dims, 0.0);
        const double expected = -0.5 * hbar_mev_ps * envelope(cfg.pulses[0], 0.0);
        CHECK(h(dims.index(1, 0), dims.index(0, 0)).real() == doctest::Approx(expected));
        CHECK(h(dims.index(1, 0), dims.index(0, 0)).imag() == doctest::Approx(0.0));
        CHECK((h - h.adjoint()).norm() == 0.0);
    }

    SUBCASE("zero areas give the zero matrix") {
        DriveConfig cfg;
        cfg.pulses.push_back({0.0, 2.0, -2.06, 0.0, 0.0});
        cfg.pulses.push_back({0.0, 2.0, -5.08, 0.0, 0.0});
        CHECK(drive_hamiltonian(cfg, dims, 1.23).norm() == 0.0);
    }

    SUBCASE("two detuned pulses match the scalar reference") {
        DriveConfig cfg;
        cfg.pulses.push_back({15.95 * pi, 2.0, -2.06, 0.0, 0.0});
        cfg.pulses.push_back({15.78 * pi, 2.0, -5.08, 0.0, 0.0});

        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> times(-6.0, 6.0);
        for (int trial = 0; trial < 5; ++trial) {
            const double t = times(rng);
            // independent element-wise evaluation of the closed form
            Complex ref = 0.0;
            for (const auto& p : cfg.pulses) {
                const double omega = p.detuning_mev / hbar_mev_ps;
                const double amp = p.area_rad / (std::sqrt(2.0 * pi) * p.sigma_ps) *
                                   std::exp(-0.5 * t * t / (p.sigma_ps * p.sigma_ps));
                ref += -0.5 * hbar_mev_ps * amp *
                       Complex(std::cos(omega * t), -std::sin(omega * t));
            }
            const Matrix h = drive_hamiltonian(cfg, dims, t);
            for (int n = 0; n <= dims.n_max; ++n) {
                CHECK(std::abs(h(dims.index(1, n), dims.index(0, n)) - ref) < 1e-13);
                CHECK(std::abs(h(dims.index(0, n), dims.index(1, n)) - std::conj(ref)) <
                      1e-13);
            }
        }
    }
}

TEST_CASE("Jaynes-Cummings Hamiltonian") {
    SystemDims dims1(1);
    CavitySpec cav{0.05, 0.0, 1};

    SUBCASE("single-excitation block eigenvalues are +-g") {
        Matrix h = jc_hamiltonian(cav, dims1);
        // the |G1>, |X0> block
        Eigen::Matrix2cd block;
        block << h(dims1.index(0, 1), dims1.index(0, 1)),
                 h(dims1.index(0, 1), dims1.index(1, 0)),
                 h(dims1.index(1, 0), dims1.index(0, 1)),
                 h(dims1.index(1, 0), dims1.index(1, 0));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
        CHECK(es.eigenvalues()(0) == doctest::Approx(-0.05));
        CHECK(es.eigenvalues()(1) == doctest::Approx(0.05));
    }

    SUBCASE("<G1|H|X0> = g") {
        Matrix h = jc_hamiltonian(cav, dims1);
        CHECK(h(dims1.index(0, 1), dims1.index(1, 0)).real() == doctest::Approx(0.05));
    }

    SUBCASE("commutes with the total excitation number") {
        SystemDims dims(2);
        CavitySpec cav2{0.05, 0.3, 2};
        Matrix h = jc_hamiltonian(cav2, dims);
        Matrix n_tot = cavity_number(dims) + qd_excited_projector(dims);
        CHECK((h * n_tot - n_tot * h).norm() < 1e-14);
    }
}

TEST_CASE("total Hamiltonian") {
    SystemDims dims(2);
    CavitySpec cav{0.05, 0.0, 2};
    DriveConfig cfg = super_paper_drive();

    SUBCASE("far from the pulse it reduces to the cavity part") {
        CHECK((total_hamiltonian(cfg, cav, dims, 1e4) - jc_hamiltonian(cav, dims)).norm() <
              1e-30);
        CHECK((total_hamiltonian(cfg, cav, dims, -1e4) - jc_hamiltonian(cav, dims)).norm() <
              1e-30);
    }

    SUBCASE("Hermitian at random times") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> times(-8.0, 8.0);
        for (int trial = 0; trial < 100; ++trial) {
            const double t = times(rng);
            const Matrix h = total_hamiltonian(cfg, cav, dims, t);
            CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        }
    }

    SUBCASE("linearity at the pulse centre") {
        const Matrix sum =
            drive_hamiltonian(cfg, dims, 0.0) + jc_hamiltonian(cav, dims);
        CHECK((total_hamiltonian(cfg, cav, dims, 0.0) - sum).norm() == 0.0);
    }
}

TEST_CASE("drive presets") {
    DriveConfig super = preset_drive("super-paper");
    REQUIRE(super.pulses.size() == 2);
    CHECK(super.pulses[0].detuning_mev == -2.06);
    CHECK(super.pulses[0].area_rad == doctest::Approx(15.95 * pi));
    CHECK(super.pulses[1].detuning_mev == -5.08);
    CHECK(super.pulses[1].area_rad == doctest::Approx(15.78 * pi));
    CHECK(super.pulses[0].sigma_ps == 2.0);
    CHECK(super.pulses[1].sigma_ps == 2.0);
    CHECK(super.pulses[0].delay_ps == super.pulses[1].delay_ps);  // zero delay

    DriveConfig re = preset_drive("re-paper");
    REQUIRE(re.pulses.size() == 1);
    CHECK(re.pulses[0].detuning_mev == 0.0);
    CHECK(re.pulses[0].sigma_ps == 2.0);

    CHECK_THROWS_AS(preset_drive("unknown"), std::invalid_argument);
}
