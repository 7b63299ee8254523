#pragma once

// Unit conventions used throughout: energies in meV, times in ps,
// rates and angular frequencies in 1/ps. All conversions route through
// the constants below.

namespace qdcav {

inline constexpr double pi = 3.14159265358979323846;

// Reduced Planck constant, meV*ps
inline constexpr double hbar_mev_ps = 0.6582119569;

// Boltzmann constant, meV/K
inline constexpr double kb_mev_per_k = 0.08617333;

// Energy (meV) -> angular frequency (rad/ps)
inline constexpr double angular_frequency(double energy_mev) {
    return energy_mev / hbar_mev_ps;
}

// Linewidth-style energy (meV) -> rate (1/ps)
inline constexpr double rate_from_energy(double energy_mev) {
    return energy_mev / hbar_mev_ps;
}

}  // namespace qdcav
