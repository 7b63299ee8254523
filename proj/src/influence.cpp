#include "qdcav/influence.hpp"

#include "qdcav/constants.hpp"
#include "qdcav/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace qdcav {

namespace {

double thermal_coth(const PhononSpec& spec, double w) {
    if (spec.temperature_k <= 0.0) return 1.0;
    const double x = hbar_mev_ps * w / (2.0 * kb_mev_per_k * spec.temperature_k);
    if (x > 20.0) return 1.0;
    return 1.0 / std::tanh(x);
}

}  // namespace

int InfluenceCoeffs::effective_memory(double rel_floor) const {
    if (eta.empty()) return 0;
    const double floor = rel_floor * std::abs(eta[0]);
    int k_eff = 0;
    for (int k = 1; k <= n_c; ++k)
        if (std::abs(eta[std::size_t(k)]) > floor) k_eff = k;
    return k_eff;
}

int InfluenceCoeffs::lag_cutoff(double tail_budget) const {
    double tail = 0.0;
    int cutoff = n_c;
    for (int k = n_c; k >= 1; --k) {
        tail += std::abs(eta[std::size_t(k)]);
        if (tail > tail_budget) {
            cutoff = k;
            break;
        }
        cutoff = k - 1;
    }
    return cutoff;
}

// The cell integrals of C(t - t') reduce to closed-form frequency kernels:
//   k = 0:  int dw J/w^2 [coth (1 - cos w dt) - i (w dt - sin w dt)]
//   k >= 1: int dw J/w^2 4 sin^2(w dt/2) [coth cos(k w dt) - i sin(k w dt)]
InfluenceCoeffs eta_coefficients(const PhononSpec& spec, double dt, int n_c) {
    validate(spec);
    if (!(dt > 0.0)) throw std::invalid_argument("eta_coefficients: dt must be positive");
    if (n_c < 1) throw std::invalid_argument("eta_coefficients: n_c must be >= 1");

    InfluenceCoeffs coeffs;
    coeffs.dt = dt;
    coeffs.n_c = n_c;
    coeffs.eta.assign(std::size_t(n_c) + 1, Complex(0.0, 0.0));
    if (spec.coupling_scale == 0.0) return coeffs;

    const double wmax = spectral_cutoff(spec);

    coeffs.eta[0] = integrate_adaptive_gk(
        [&](double w) -> Complex {
            const double j_w2 = spectral_density(spec, w) / (w * w);
            const double wdt = w * dt;
            return j_w2 * Complex(thermal_coth(spec, w) * (1.0 - std::cos(wdt)),
                                  -(wdt - std::sin(wdt)));
        },
        0.0, wmax, 1e-10, 1e-18, 20000);

    // lagged coefficients decay to nothing; target their error against the
    // self-coefficient scale rather than their own vanishing magnitude
    const double abs_floor = 1e-13 * std::abs(coeffs.eta[0]) + 1e-18;
    for (int k = 1; k <= n_c; ++k) {
        coeffs.eta[std::size_t(k)] = integrate_adaptive_gk(
            [&](double w) -> Complex {
                const double j_w2 = spectral_density(spec, w) / (w * w);
                const double s = std::sin(0.5 * w * dt);
                const double phase = double(k) * w * dt;
                return j_w2 * 4.0 * s * s *
                       Complex(thermal_coth(spec, w) * std::cos(phase), -std::sin(phase));
            },
            0.0, wmax, 1e-10, abs_floor, 40000);
    }
    return coeffs;
}

}  // namespace qdcav
