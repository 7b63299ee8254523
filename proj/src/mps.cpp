#include "qdcav/mps.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace qdcav {

Matrix stack_rows(const SiteTensor& site) {
    const auto l = site.left();
    const auto r = site.right();
    Matrix g(l * site.phys(), r);
    for (int p = 0; p < site.phys(); ++p) g.middleRows(p * l, l) = site.blocks[p];
    return g;
}

SiteTensor unstack_rows(const Matrix& g, int phys) {
    assert(g.rows() % phys == 0);
    const auto l = g.rows() / phys;
    SiteTensor site;
    site.blocks.reserve(phys);
    for (int p = 0; p < phys; ++p) site.blocks.push_back(g.middleRows(p * l, l));
    return site;
}

Matrix stack_cols(const SiteTensor& site) {
    const auto l = site.left();
    const auto r = site.right();
    Matrix g(l, r * site.phys());
    for (int p = 0; p < site.phys(); ++p) g.middleCols(p * r, r) = site.blocks[p];
    return g;
}

SiteTensor unstack_cols(const Matrix& g, int phys) {
    assert(g.cols() % phys == 0);
    const auto r = g.cols() / phys;
    SiteTensor site;
    site.blocks.reserve(phys);
    for (int p = 0; p < phys; ++p) site.blocks.push_back(g.middleCols(p * r, r));
    return site;
}

namespace {

TruncatedSvd finish_svd(const Matrix& u, const Eigen::VectorXd& s, const Matrix& v,
                        double rel_threshold, int max_bond) {
    const Eigen::Index n = s.size();
    Eigen::Index keep = 1;
    if (n > 0) {
        const double cutoff = rel_threshold * s(0);
        keep = n;
        while (keep > 1 && s(keep - 1) < cutoff) --keep;
        keep = std::min<Eigen::Index>(keep, max_bond);
    }
    TruncatedSvd out;
    out.u = u.leftCols(keep);
    out.s = s.head(keep);
    out.v = v.leftCols(keep);
    const double total = s.squaredNorm();
    if (total > 0.0 && keep < n)
        out.discarded = std::sqrt(s.tail(n - keep).squaredNorm() / total);
    return out;
}

}  // namespace

TruncatedSvd truncated_svd(const Matrix& g, double rel_threshold, int max_bond) {
    const Eigen::Index m = g.rows(), n = g.cols();

    // Deliberately not JacobiSVD: chains carry singular values spanning the
    // whole double range (influence factors of long-dead branches underflow),
    // and two-sided Jacobi loses orthogonality of U there. The Gram route
    // gets its orthonormal factor from a self-adjoint eigensolver, which is
    // unconditionally robust; the back-multiplied factor is re-orthonormalised
    // below. The sqrt halves the precision of the smallest singular values,
    // which only ever sit at the truncation edge.

    // The factor recovered by back-multiplication loses orthonormality for
    // singular values near the roundoff floor; a thin QR restores it while
    // keeping the nested leading subspaces intact.
    const auto orthonormalize = [](Matrix& a) {
        Eigen::HouseholderQR<Matrix> qr(a);
        a = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    };

    if (m >= n) {
        const Matrix gram = g.adjoint() * g;
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);  // ascending
        const Eigen::Index k = n;
        Eigen::VectorXd s(k);
        Matrix v(n, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            s(i) = std::sqrt(std::max(0.0, es.eigenvalues()(k - 1 - i)));
            v.col(i) = es.eigenvectors().col(k - 1 - i);
        }
        const double floor = s(0) * 1e-15 + 1e-300;
        Matrix u = g * v;
        for (Eigen::Index i = 0; i < k; ++i)
            u.col(i) /= std::max(s(i), floor);
        orthonormalize(u);
        return finish_svd(u, s, v, rel_threshold, max_bond);
    }

    const Matrix gram = g * g.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Eigen::Index k = m;
    Eigen::VectorXd s(k);
    Matrix u(m, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        s(i) = std::sqrt(std::max(0.0, es.eigenvalues()(k - 1 - i)));
        u.col(i) = es.eigenvectors().col(k - 1 - i);
    }
    const double floor = s(0) * 1e-15 + 1e-300;
    Matrix v = g.adjoint() * u;
    for (Eigen::Index i = 0; i < k; ++i)
        v.col(i) /= std::max(s(i), floor);
    orthonormalize(v);
    return finish_svd(u, s, v, rel_threshold, max_bond);
}

void left_orthogonalize(Chain& chain) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        Matrix g = stack_rows(chain[i]);
        const Eigen::Index r = std::min(g.rows(), g.cols());
        Eigen::HouseholderQR<Matrix> qr(g);
        Matrix thin_q = qr.householderQ() * Matrix::Identity(g.rows(), r);
        Matrix rm = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        chain[i] = unstack_rows(thin_q, chain[i].phys());
        for (auto& b : chain[i + 1].blocks) b = rm * b;
    }
}

void right_truncate(Chain& chain, double rel_threshold, int max_bond,
                    TruncationStats& stats) {
    // The sweep keeps, at every bond, the exact image of the all-ones cap
    // contraction alongside the dominant singular directions. Truncation
    // then never touches the readout functional, so the trace of every
    // recovered state is preserved to rounding rather than to the SVD
    // threshold.
    Vector cap = Vector::Ones(1);
    for (std::size_t i = chain.size(); i-- > 1;) {
        SiteTensor& site = chain[i];
        Vector u = Vector::Zero(site.left());
        for (const auto& b : site.blocks) u += b * cap;

        Matrix g = stack_cols(site);
        TruncatedSvd svd = truncated_svd(g, rel_threshold, max_bond);
        Matrix basis = svd.u;
        append_orthogonal(basis, u, 1e-12);

        // project, then restore right-orthonormality of the site so the next
        // bond sees true Schmidt weights: B^dag G = W Q with Q row-orthonormal
        const Matrix projected = basis.adjoint() * g;
        Eigen::HouseholderQR<Matrix> qr(projected.adjoint());
        const Eigen::Index k = projected.rows();
        Matrix q = (qr.householderQ() * Matrix::Identity(projected.cols(), k)).adjoint();
        Matrix w = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        w.adjointInPlace();  // projected = w * q

        site = unstack_cols(q, site.phys());
        const Matrix carry = basis * w;
        for (auto& b : chain[i - 1].blocks) b = b * carry;
        Vector new_cap = Vector::Zero(k);
        for (const auto& b : site.blocks) new_cap += b * cap;
        cap = std::move(new_cap);

        stats.max_bond = std::max(stats.max_bond, static_cast<int>(basis.cols()));
        stats.max_discarded_weight = std::max(stats.max_discarded_weight, svd.discarded);
    }
    if (!chain.empty())
        stats.max_bond = std::max(stats.max_bond, static_cast<int>(chain[0].right()));
}

void compress(Chain& chain, double rel_threshold, int max_bond, TruncationStats& stats) {
    if (chain.size() < 2) return;
    left_orthogonalize(chain);
    right_truncate(chain, rel_threshold, max_bond, stats);
}

void sum_out_last(Chain& chain) {
    assert(!chain.empty());
    const SiteTensor& last = chain.back();
    Matrix sum = Matrix::Zero(last.left(), last.right());
    for (const auto& b : last.blocks) sum += b;
    if (chain.size() == 1)
        throw std::logic_error("sum_out_last: cannot drop the only site");
    for (auto& b : chain[chain.size() - 2].blocks) b = b * sum;
    chain.pop_back();
}

std::vector<Vector> ones_caps(const Chain& chain) {
    std::vector<Vector> caps(chain.size());
    Vector cap = Vector::Ones(1);
    for (std::size_t i = chain.size(); i-- > 0;) {
        caps[i] = cap;
        Vector next = Vector::Zero(chain[i].left());
        for (const auto& b : chain[i].blocks) next += b * cap;
        cap.swap(next);
    }
    return caps;
}

Complex contract_path(const Chain& chain, const std::vector<int>& path) {
    if (path.size() != chain.size())
        throw std::invalid_argument("contract_path: path length mismatch");
    Matrix v = Matrix::Ones(1, 1);
    for (std::size_t i = 0; i < chain.size(); ++i)
        v = v * chain[i].blocks[std::size_t(path[i])];
    assert(v.rows() == 1 && v.cols() == 1);
    return v(0, 0);
}

namespace {

int channel_slot(int d) { return d == 0 ? 0 : (d > 0 ? 1 : 2); }

}  // namespace

bool append_orthogonal(Matrix& basis, const Vector& u, double rel_floor) {
    if (basis.cols() >= basis.rows()) return false;
    Vector r = u - basis * (basis.adjoint() * u);
    r -= basis * (basis.adjoint() * r);  // second pass keeps conditioning safe
    const double n = r.norm();
    if (!(n > rel_floor * u.norm()) || n == 0.0) return false;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = r / n;
    return true;
}

void apply_receiver(Chain& chain, std::size_t receiver, int direction,
                    const std::vector<int>& channel_of_phys,
                    const std::vector<Complex>& self_factor,
                    const ChannelFactors& factors) {
    assert(receiver < chain.size());
    assert(direction == 1 || direction == -1);
    SiteTensor& rec = chain[receiver];
    assert(static_cast<int>(channel_of_phys.size()) == rec.phys());

    std::size_t available =
        direction > 0 ? chain.size() - 1 - receiver : receiver;
    const std::size_t n_targets = std::min(available, factors.lag.size());

    if (n_targets == 0) {
        for (int p = 0; p < rec.phys(); ++p) rec.blocks[p] *= self_factor[std::size_t(p)];
        return;
    }

    // Receiver: route each physical component into its message channel.
    {
        const auto l = rec.left();
        const auto r = rec.right();
        for (int p = 0; p < rec.phys(); ++p) {
            const int slot = channel_slot(channel_of_phys[std::size_t(p)]);
            if (direction > 0) {
                Matrix nb = Matrix::Zero(l, 3 * r);
                nb.middleCols(slot * r, r) = self_factor[std::size_t(p)] * rec.blocks[p];
                rec.blocks[p] = std::move(nb);
            } else {
                Matrix nb = Matrix::Zero(3 * l, r);
                nb.middleRows(slot * l, l) = self_factor[std::size_t(p)] * rec.blocks[p];
                rec.blocks[p] = std::move(nb);
            }
        }
    }

    for (std::size_t delta = 1; delta <= n_targets; ++delta) {
        SiteTensor& tgt = chain[direction > 0 ? receiver + delta : receiver - delta];
        const auto& fplus = factors.lag[delta - 1][0];
        const auto& fminus = factors.lag[delta - 1][1];
        const bool closing = (delta == n_targets);
        const auto l = tgt.left();
        const auto r = tgt.right();
        for (int a = 0; a < tgt.phys(); ++a) {
            const Complex fp = fplus[std::size_t(a)];
            const Complex fm = fminus[std::size_t(a)];
            const Matrix& old = tgt.blocks[a];
            if (!closing) {
                Matrix nb = Matrix::Zero(3 * l, 3 * r);
                nb.block(0, 0, l, r) = old;
                nb.block(l, r, l, r) = fp * old;
                nb.block(2 * l, 2 * r, l, r) = fm * old;
                tgt.blocks[a] = std::move(nb);
            } else if (direction > 0) {
                // channel closes: merge the three messages back into one bond
                Matrix nb(3 * l, r);
                nb.topRows(l) = old;
                nb.middleRows(l, l) = fp * old;
                nb.bottomRows(l) = fm * old;
                tgt.blocks[a] = std::move(nb);
            } else {
                Matrix nb(l, 3 * r);
                nb.leftCols(r) = old;
                nb.middleCols(r, r) = fp * old;
                nb.rightCols(r) = fm * old;
                tgt.blocks[a] = std::move(nb);
            }
        }
    }
}

}  // namespace qdcav
