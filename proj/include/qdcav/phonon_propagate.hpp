#pragma once

#include "qdcav/dynamics.hpp"
#include "qdcav/process_tensor.hpp"

namespace qdcav {

struct PhononRunStats {
    int n_steps = 0;
    int effective_memory = 0;   // lags actually carried by the window
    int max_bond = 1;
    double max_discarded_weight = 0.0;
};

// Splits the propagated system block y (dim^2 x chi) by coupling sector,
// duplicating the sector label of the system index into a new memory leg.
// The truncation keeps the image of the caps vector exactly so the split
// never perturbs the current readout.
void sector_split(const Matrix& y, const std::vector<int>& sector_of,
                  double rel_threshold, const Vector& cap, TruncationStats& stats,
                  SiteTensor& system_site, SiteTensor& memory_site);

// Numerically exact propagation with the pure-dephasing phonon bath included
// through its discretised influence functional, contracted step by step as a
// compressed tensor network. The system Liouvillian (drive, cavity, losses)
// is Trotter-split symmetrically around the process-tensor grid points; its
// internal integration obeys the solver step caps.
//
// Reduces to the phonon-free propagate() when spec.enabled is false; with
// J = 0 the influence factors are exactly unity and the result matches the
// phonon-free trajectory to integration accuracy.
Trajectory propagate_with_phonons(const DriveConfig& cfg, const CavitySpec& cav,
                                  const LossRates& losses, const SolverConfig& solver,
                                  const PhononSpec& spec, const CompressionConfig& comp,
                                  const Matrix* initial = nullptr,
                                  PhononRunStats* stats = nullptr);

}  // namespace qdcav
