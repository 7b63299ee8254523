#pragma once

#include "qdcav/phonons.hpp"

#include <complex>
#include <vector>

namespace qdcav {

// Discretised influence-functional memory coefficients on a uniform grid of
// step dt: eta[k] is the double integral of the bath correlation function
// C(t - t') over two grid cells separated by k steps (triangular half-cell
// for k = 0). The coefficients decay with k on the bath memory scale.
struct InfluenceCoeffs {
    double dt = 0.0;
    int n_c = 0;                     // memory length in steps
    std::vector<Complex> eta;        // eta[k], k = 0 .. n_c

    // Largest lag whose coefficient is above rel_floor * |eta[0]|; factors
    // beyond it differ from unity by less than machine noise and may be
    // skipped without changing results.
    int effective_memory(double rel_floor = 1e-14) const;

    // Smallest window L with sum_{k > L} |eta_k| <= tail_budget: dropping
    // lags beyond L perturbs each step's path weight by at most twice the
    // budget, so a budget tied to the SVD threshold keeps the truncation
    // error balanced between the two cutoffs.
    int lag_cutoff(double tail_budget) const;
};

InfluenceCoeffs eta_coefficients(const PhononSpec& spec, double dt, int n_c);

}  // namespace qdcav
