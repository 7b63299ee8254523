#include "qdcav/observables.hpp"

#include "qdcav/constants.hpp"
#include "qdcav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qdcav {

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    return acc;
}

}  // namespace

MetricsRecord integrate_metrics(const Trajectory& traj) {
    const std::size_t n = traj.size();
    if (n < 2) throw std::invalid_argument("integrate_metrics: trajectory too short");

    std::vector<double> abs01(n), r11(n), absgx(n), rxx(n);
    double max01 = 0.0, max11 = 0.0, max22 = 0.0;
    const bool has_n2 = traj.cavity[0].rows() > 2;
    for (std::size_t i = 0; i < n; ++i) {
        abs01[i] = std::abs(traj.rho_01(i));
        r11[i] = traj.cavity[i].rows() > 1 ? traj.rho_nn(i, 1) : 0.0;
        absgx[i] = std::abs(traj.rho_gx(i));
        rxx[i] = traj.rho_xx(i);
        max01 = std::max(max01, abs01[i]);
        max11 = std::max(max11, r11[i]);
        if (has_n2) max22 = std::max(max22, traj.rho_nn(i, 2));
    }

    MetricsRecord m;
    m.rho01_int = trapezoid(traj.times, abs01);
    m.rho11_int = trapezoid(traj.times, r11);
    m.rhoGX_int = trapezoid(traj.times, absgx);
    m.rhoXX_int = trapezoid(traj.times, rxx);
    m.photon_int = trapezoid(traj.times, traj.photon_number);

    if (max11 > 0.0) {
        m.rho22_rho11_ratio = max22 / max11;
    } else {
        m.rho22_rho11_ratio = 0.0;
        m.ratio_degenerate = true;
    }

    if (max01 > 0.0 && abs01.back() > 1e-4 * max01) {
        m.tail_warning = true;
        // estimate the missing integral from the terminal decay rate
        const std::size_t i1 = n - 1;
        std::size_t i0 = i1;
        while (i0 > 0 && traj.times[i1] - traj.times[i0] < 2.0) --i0;
        const double f0 = abs01[i0], f1 = abs01[i1];
        if (f0 > f1 && f1 > 0.0) {
            const double rate = std::log(f0 / f1) / (traj.times[i1] - traj.times[i0]);
            const double tail = f1 / rate;
            m.tail_fraction = tail / (m.rho01_int + tail);
        }
    }
    return m;
}

HOMPrediction hom_intensities(double rho11, double abs_rho01, double phase_diff) {
    if (rho11 < 0.0)
        throw std::invalid_argument("hom_intensities: rho11 must be non-negative");
    const double coh2 = abs_rho01 * abs_rho01;
    if (coh2 > rho11 + 1e-12)
        throw std::invalid_argument(
            "hom_intensities: purity bound violated (|rho01|^2 > rho11)");
    HOMPrediction out;
    out.phase_diff = phase_diff;
    const double interference = coh2 * std::cos(phase_diff);
    out.n_c = rho11 + interference;
    out.n_d = rho11 - interference;
    return out;
}

std::vector<Complex> kernel_model_rho01(std::span<const double> times,
                                        std::span<const Complex> rho_gx,
                                        double coupling_mev, double kappa,
                                        double cavity_detuning_mev) {
    if (times.size() != rho_gx.size())
        throw std::invalid_argument("kernel_model_rho01: size mismatch");
    if (times.size() < 2)
        throw std::invalid_argument("kernel_model_rho01: need at least two samples");
    const double dt = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i)
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw std::invalid_argument("kernel_model_rho01: non-uniform sampling");

    const double g = angular_frequency(coupling_mev);
    const double w_c = angular_frequency(cavity_detuning_mev);
    const Complex decay = std::exp(Complex(-0.5 * kappa * dt, -w_c * dt));
    const Complex minus_ig(0.0, -g);

    std::vector<Complex> rho01(times.size());
    rho01[0] = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        rho01[i] = decay * rho01[i - 1] +
                   minus_ig * 0.5 * dt * (decay * rho_gx[i - 1] + rho_gx[i]);
    return rho01;
}

double truncation_check(const Trajectory& traj, bool* degenerate) {
    if (traj.size() == 0) throw std::invalid_argument("truncation_check: empty trajectory");
    if (traj.cavity[0].rows() < 3)
        throw std::invalid_argument("truncation_check: requires n_max >= 2");
    double max11 = 0.0, max22 = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        max11 = std::max(max11, traj.rho_nn(i, 1));
        max22 = std::max(max22, traj.rho_nn(i, 2));
    }
    if (degenerate) *degenerate = (max11 == 0.0);
    return max11 > 0.0 ? max22 / max11 : 0.0;
}

void write_metrics_csv(std::ostream& out, const MetricsRecord& m) {
    out << "rho01_int,rho11_int,rhoGX_int,rhoXX_int,n_int,rho22_rho11_ratio\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  m.rho01_int, m.rho11_int, m.rhoGX_int, m.rhoXX_int, m.photon_int,
                  m.rho22_rho11_ratio);
    out << buf;
}

void write_metrics_csv(const std::string& path, const MetricsRecord& m) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    write_metrics_csv(f, m);
}

}  // namespace qdcav
