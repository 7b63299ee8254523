#pragma once

#include "qdcav/hilbert.hpp"

#include <array>
#include <vector>

namespace qdcav {

// Site tensor T[l, p, r] of a matrix-product state, stored as one
// left x right matrix per physical index p.
struct SiteTensor {
    std::vector<Matrix> blocks;

    Eigen::Index left() const { return blocks.empty() ? 0 : blocks.front().rows(); }
    Eigen::Index right() const { return blocks.empty() ? 0 : blocks.front().cols(); }
    int phys() const { return static_cast<int>(blocks.size()); }
};

using Chain = std::vector<SiteTensor>;

struct TruncationStats {
    int max_bond = 1;
    double max_discarded_weight = 0.0;  // worst relative discarded singular weight

    void merge(const TruncationStats& o) {
        max_bond = std::max(max_bond, o.max_bond);
        max_discarded_weight = std::max(max_discarded_weight, o.max_discarded_weight);
    }
};

// Rows grouped as (p, l): G[(p*L + l), r]
Matrix stack_rows(const SiteTensor& site);
SiteTensor unstack_rows(const Matrix& g, int phys);

// Columns grouped as (p, r): G[l, (p*R + r)]
Matrix stack_cols(const SiteTensor& site);
SiteTensor unstack_cols(const Matrix& g, int phys);

// Thin SVD with relative truncation: keeps singular values
// >= rel_threshold * s_max, capped at max_bond (at least one).
struct TruncatedSvd {
    Matrix u;                // m x k
    Eigen::VectorXd s;       // k
    Matrix v;                // n x k, g ~ u * s.asDiagonal() * v.adjoint()
    double discarded = 0.0;  // relative discarded weight, sqrt(sum s_cut^2 / sum s^2)
};
TruncatedSvd truncated_svd(const Matrix& g, double rel_threshold, int max_bond);

// Sweeps QR left-to-right; afterwards every site except the last is
// left-orthonormal and the norm sits in the last site.
void left_orthogonalize(Chain& chain);

// Right-to-left truncating SVD sweep; afterwards every site except the
// first is right-orthonormal. Call after left_orthogonalize for optimal
// truncation.
void right_truncate(Chain& chain, double rel_threshold, int max_bond,
                    TruncationStats& stats);

void compress(Chain& chain, double rel_threshold, int max_bond, TruncationStats& stats);

// Contracts the physical index of the last site with ones and absorbs the
// result into its left neighbour (drops the site).
void sum_out_last(Chain& chain);

// cap[i] = contraction of sites i+1..end with all-ones physical indices;
// cap.back() is the trivial right boundary. cap[i] has the length of the
// bond right of site i.
std::vector<Vector> ones_caps(const Chain& chain);

// Full contraction with a fixed physical index per site (test helper).
Complex contract_path(const Chain& chain, const std::vector<int>& path);

// Extends an isometry by the direction of u orthogonal to its columns;
// returns false when u is already represented to rel_floor or the basis
// is full. Used to pin readout functionals through truncations.
bool append_orthogonal(Matrix& basis, const Vector& u, double rel_floor);

// Influence factors broadcast from a receiver site to neighbours: the
// receiver's physical index p selects a message channel d(p) in {0, +1, -1}
// and a self factor; a target at distance delta multiplies its physical
// index alpha by lag[delta-1][0][alpha] (d = +1) or lag[delta-1][1][alpha]
// (d = -1); channel 0 is the identity.
struct ChannelFactors {
    std::vector<std::array<std::vector<Complex>, 2>> lag;
};

// Applies sum_d P_d (x) prod_delta D_delta^(d) to the chain, where P_d picks
// the receiver components with channel d (times their self factor) and the
// diagonal D factors act on sites receiver+direction*delta. Targets beyond
// the chain end are dropped (their factors are negligible by construction).
// Bond dimensions grow by up to 3x across the touched range; compress after.
void apply_receiver(Chain& chain, std::size_t receiver, int direction,
                    const std::vector<int>& channel_of_phys,
                    const std::vector<Complex>& self_factor,
                    const ChannelFactors& factors);

}  // namespace qdcav
