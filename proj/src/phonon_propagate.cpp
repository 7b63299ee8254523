#include "qdcav/phonon_propagate.hpp"

#include "qdcav/constants.hpp"
#include "qdcav/errors.hpp"
#include "qdcav/integrator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qdcav {

void sector_split(const Matrix& y, const std::vector<int>& sector_of,
                  double rel_threshold, const Vector& cap, TruncationStats& stats,
                  SiteTensor& system_site, SiteTensor& memory_site) {
    const Eigen::Index rows = y.rows();
    const Eigen::Index chi = y.cols();

    std::array<std::vector<Eigen::Index>, n_path_indices> rows_of;
    for (Eigen::Index p = 0; p < rows; ++p)
        rows_of[std::size_t(sector_of[std::size_t(p)])].push_back(p);

    std::array<Matrix, n_path_indices> ya;
    std::array<TruncatedSvd, n_path_indices> svd;
    double sigma_max = 0.0;
    for (int a = 0; a < n_path_indices; ++a) {
        const auto& rws = rows_of[std::size_t(a)];
        if (rws.empty()) continue;
        Matrix& m = ya[std::size_t(a)];
        m.resize(Eigen::Index(rws.size()), chi);
        for (std::size_t i = 0; i < rws.size(); ++i) m.row(Eigen::Index(i)) = y.row(rws[i]);
        svd[std::size_t(a)] = truncated_svd(m, 0.0, int(std::min<Eigen::Index>(rws.size(), chi)));
        if (svd[std::size_t(a)].s.size() > 0)
            sigma_max = std::max(sigma_max, svd[std::size_t(a)].s(0));
    }

    // per-sector kept right bases, each extended by the caps direction
    std::array<Matrix, n_path_indices> basis, factor;
    std::array<Eigen::Index, n_path_indices> keep{}, offset{};
    Eigen::Index total = 0;
    for (int a = 0; a < n_path_indices; ++a) {
        if (rows_of[std::size_t(a)].empty()) continue;
        const auto& s = svd[std::size_t(a)].s;
        Eigen::Index k = 0;  // a sector below threshold may vanish entirely
        while (k < s.size() && s(k) >= rel_threshold * sigma_max) ++k;

        Matrix b = svd[std::size_t(a)].v.leftCols(k);
        append_orthogonal(b, cap, 1e-12);
        if (b.cols() == 0) {
            keep[std::size_t(a)] = 0;
            offset[std::size_t(a)] = total;
            continue;
        }

        // Y_a B = Q R, so the system rows stay isometric per sector
        const Matrix c = ya[std::size_t(a)] * b;
        Eigen::HouseholderQR<Matrix> qr(c);
        const Eigen::Index kk = std::min<Eigen::Index>(c.rows(), c.cols());
        basis[std::size_t(a)] = qr.householderQ() * Matrix::Identity(c.rows(), kk);
        Matrix r = qr.matrixQR().topRows(kk).triangularView<Eigen::Upper>();
        factor[std::size_t(a)] = r * b.adjoint();

        keep[std::size_t(a)] = kk;
        offset[std::size_t(a)] = total;
        total += kk;
    }
    if (total == 0) throw NumericalError("sector_split: state vanished");
    stats.max_bond = std::max(stats.max_bond, int(total));

    system_site.blocks.assign(std::size_t(rows), Matrix::Zero(1, total));
    for (int a = 0; a < n_path_indices; ++a) {
        const auto& rws = rows_of[std::size_t(a)];
        const Eigen::Index k = keep[std::size_t(a)];
        for (std::size_t i = 0; i < rws.size(); ++i)
            system_site.blocks[std::size_t(rws[i])].block(0, offset[std::size_t(a)], 1, k) =
                basis[std::size_t(a)].row(Eigen::Index(i)).head(k);
    }

    memory_site.blocks.assign(n_path_indices, Matrix::Zero(total, chi));
    for (int a = 0; a < n_path_indices; ++a) {
        const Eigen::Index k = keep[std::size_t(a)];
        if (k == 0) continue;
        memory_site.blocks[std::size_t(a)].middleRows(offset[std::size_t(a)], k) =
            factor[std::size_t(a)];
    }
}

namespace {

Matrix system_block(const SiteTensor& site) {
    Matrix y(site.phys(), site.right());
    for (int p = 0; p < site.phys(); ++p) y.row(p) = site.blocks[std::size_t(p)];
    return y;
}

SiteTensor to_system_site(const Matrix& y) {
    SiteTensor site;
    site.blocks.reserve(std::size_t(y.rows()));
    for (Eigen::Index p = 0; p < y.rows(); ++p) site.blocks.push_back(y.row(p));
    return site;
}

}  // namespace

Trajectory propagate_with_phonons(const DriveConfig& cfg, const CavitySpec& cav,
                                  const LossRates& losses, const SolverConfig& solver,
                                  const PhononSpec& spec, const CompressionConfig& comp,
                                  const Matrix* initial, PhononRunStats* stats_out) {
    validate(spec);
    validate(comp);
    if (!spec.enabled) return propagate(cfg, cav, losses, solver, initial);

    validate(cfg);
    validate(cav);
    validate(losses);
    validate(solver, cfg);

    const SystemDims dims(cav.n_max);
    const int d = dims.dim();
    Matrix rho0;
    if (initial) {
        if (initial->rows() != d || initial->cols() != d)
            throw std::invalid_argument("propagate_with_phonons: initial state dimension mismatch");
        rho0 = *initial;
    } else {
        rho0 = Matrix::Zero(d, d);
        rho0(dims.index(0, 0), dims.index(0, 0)) = 1.0;
    }

    const double dt = spec.dt_ps;
    const int n_c = spec.memory_steps();
    const InfluenceCoeffs coeffs = cached_eta_coefficients(spec, dt, n_c);
    const int k_eff = std::min(coeffs.effective_memory(),
                               coeffs.lag_cutoff(0.25 * comp.svd_threshold));
    const bool bath_trivial = std::abs(coeffs.eta[0]) == 0.0 && k_eff == 0;

    const auto n_steps = static_cast<int>(
        std::ceil((solver.t_end - solver.t_start) / dt - 1e-9));
    const int out_every = std::max(1, int(std::lround(solver.output_stride / dt)));

    const MasterEquation equation(cfg, cav, dims, losses);
    const Matrix number_op = cavity_number(dims);

    // sector of a vectorised density-matrix component rho_ij, p = i + d*j
    std::vector<int> sector_of(std::size_t(d) * std::size_t(d));
    std::vector<int> channels(sector_of.size());
    std::vector<Complex> self(sector_of.size());
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            const int p = i + d * j;
            const int alpha = 2 * dims.qd_of(i) + dims.qd_of(j);
            sector_of[std::size_t(p)] = alpha;
            channels[std::size_t(p)] = path_channel(alpha);
            self[std::size_t(p)] = influence_self_factor(coeffs.eta[0], alpha);
        }
    const ChannelFactors lagf = lag_factors(coeffs, k_eff);

    StepControl ctl;
    ctl.rtol = solver.rtol;
    ctl.atol = solver.atol;
    ctl.fixed_dt = solver.fixed_dt;
    const auto cap = [&](double t) {
        return pulse_active(cfg, t) ? solver.max_step_pulse : solver.max_step_tail;
    };
    const auto batched_rhs = [&](double t, const Matrix& y) {
        Matrix out(y.rows(), y.cols());
        equation.apply_vec(t, y, out);
        return out;
    };

    TruncationStats trunc;
    Chain chain;
    {
        Matrix y0 = Eigen::Map<const Matrix>(rho0.data(), d * d, 1);
        chain.push_back(to_system_site(y0));
    }

    Trajectory traj;
    const auto record = [&](double t, const Matrix& rho, std::size_t out_index) {
        const bool eig_check = solver.positivity_stride > 0 &&
                               out_index % std::size_t(solver.positivity_stride) == 0;
        check_state_validity(rho, t, solver.validity_tol, eig_check);
        traj.times.push_back(t);
        traj.qd.push_back(partial_trace_cavity(rho, dims));
        traj.cavity.push_back(partial_trace_qd(rho, dims));
        traj.photon_number.push_back((rho * number_op).trace().real());
    };

    record(solver.t_start, rho0, 0);
    std::size_t out_index = 1;
    double t_proj_prev = solver.t_start;
    const bool debug_steps = std::getenv("QDCAV_DEBUG_STEPS") != nullptr;

    for (int k = 1; k <= n_steps; ++k) {
        const double tau_k = solver.t_start + (double(k) - 0.5) * dt;
        const double t_k = solver.t_start + double(k) * dt;
        const auto wall0 = std::chrono::steady_clock::now();

        Matrix y = system_block(chain.front());
        integrate_adaptive(batched_rhs, y, t_proj_prev, tau_k, ctl, cap);
        t_proj_prev = tau_k;
        chain.front() = to_system_site(y);

        if (!bath_trivial) {
            // couple the current step to the stored records alpha_{k-1},
            // alpha_{k-2}, ... before recording alpha_k itself
            apply_receiver(chain, 0, +1, channels, self, lagf);
            if (k_eff >= 1) {
                SiteTensor sys_site, mem_site;
                const Vector cap = ones_caps(chain)[0];
                sector_split(system_block(chain.front()), sector_of, comp.svd_threshold,
                             cap, trunc, sys_site, mem_site);
                if (debug_steps) {
                    int b = 0;
                    for (const auto& s : chain) b = std::max(b, int(s.right()));
                    std::fprintf(stderr, "   post-receiver bond %d, split bond %d\n", b,
                                 int(sys_site.right()));
                }
                chain.front() = std::move(sys_site);
                chain.insert(chain.begin() + 1, std::move(mem_site));
                if (int(chain.size()) - 1 > k_eff) sum_out_last(chain);
                compress(chain, comp.svd_threshold, comp.max_bond, trunc);
            }
        }
        if (debug_steps) {
            int max_b = 0;
            for (const auto& s : chain) max_b = std::max(max_b, int(s.right()));
            std::fprintf(stderr, "step %4d: %6.1f ms, chain %3zu, bond %3d\n", k,
                         1e3 * std::chrono::duration<double>(
                                   std::chrono::steady_clock::now() - wall0).count(),
                         chain.size(), max_b);
        }

        if (k % out_every == 0 || k == n_steps) {
            const std::vector<Vector> caps = ones_caps(chain);
            const SiteTensor& head = chain.front();
            Matrix rho_vec(d * d, 1);
            for (int p = 0; p < head.phys(); ++p)
                rho_vec(p, 0) = (head.blocks[std::size_t(p)] * caps[0])(0, 0);
            integrate_adaptive(batched_rhs, rho_vec, tau_k, t_k, ctl, cap);
            const Matrix rho = Eigen::Map<const Matrix>(rho_vec.data(), d, d);
            record(t_k, rho, out_index);
            ++out_index;
        }
    }

    if (stats_out) {
        stats_out->n_steps = n_steps;
        stats_out->effective_memory = k_eff;
        stats_out->max_bond = trunc.max_bond;
        stats_out->max_discarded_weight = trunc.max_discarded_weight;
    }
    return traj;
}

}  // namespace qdcav
