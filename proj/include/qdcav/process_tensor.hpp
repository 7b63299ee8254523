#pragma once

#include "qdcav/influence.hpp"
#include "qdcav/mps.hpp"

#include <optional>
#include <string>

namespace qdcav {

// Path-index conventions for the pure-dephasing influence functional.
// The coupling operator sigma^dag sigma has eigenvalues {0, 1}; one
// time step of the doubled (Liouville-space) path carries the pair
// (nu, mu) of left/right eigenvalue indices, encoded as alpha = 2 nu + mu:
//   0 = (G,G), 1 = (G,X), 2 = (X,G), 3 = (X,X).
inline constexpr int n_path_indices = 4;
inline int path_nu(int alpha) { return alpha >> 1; }
inline int path_mu(int alpha) { return alpha & 1; }
inline int path_channel(int alpha) { return path_nu(alpha) - path_mu(alpha); }

// g_k(alpha) = eta_k nu - conj(eta_k) mu; a step at lag k in the past
// contributes exp(-d * g_k(alpha_past)) for a current step with channel d.
Complex influence_g(Complex eta, int alpha);

// Self factor of one step, exp(-d(alpha) * g_0(alpha)).
Complex influence_self_factor(Complex eta0, int alpha);

// Tables used to broadcast a step's influence to its memory window.
std::vector<int> path_channels();
std::vector<Complex> self_factors(const InfluenceCoeffs& coeffs);
ChannelFactors lag_factors(const InfluenceCoeffs& coeffs, int max_lag);

// Reference influence functional by direct evaluation (test oracle scale:
// cost is quadratic in the path length).
Complex influence_weight_direct(const InfluenceCoeffs& coeffs, const std::vector<int>& path);

struct CompressionConfig {
    double svd_threshold = 1e-7;  // relative singular value cutoff
    int max_bond = 256;
};

void validate(const CompressionConfig& comp);

// Compressed influence functional of n_steps time steps: an MPS over the
// per-step path indices whose contraction with a fixed path reproduces the
// influence weight. Built by applying one step's factors at a time and
// recompressing, so prefixes are complete at every stage.
struct ProcessTensor {
    double dt = 0.0;
    int n_c = 0;
    Chain sites;  // one site per step, physical dimension 4
    TruncationStats stats;

    int n_steps() const { return static_cast<int>(sites.size()); }
};

ProcessTensor build_process_tensor(const InfluenceCoeffs& coeffs,
                                   const CompressionConfig& comp, int n_steps);
ProcessTensor build_process_tensor(const PhononSpec& spec, double dt, int n_c,
                                   const CompressionConfig& comp, int n_steps);

// ---------------------------------------------------------------------------
// Binary caches, keyed by a content hash of the generating parameters and
// stored under the directory named by the QDCAV_PT_CACHE environment
// variable (caching is disabled when it is unset). Format is versioned;
// stale versions are ignored.

std::optional<std::string> pt_cache_dir();

std::uint64_t coeffs_cache_key(const PhononSpec& spec, double dt, int n_c);
std::uint64_t pt_cache_key(const PhononSpec& spec, double dt, int n_c,
                           const CompressionConfig& comp, int n_steps);

bool save_influence_coeffs(const std::string& path, const InfluenceCoeffs& coeffs);
std::optional<InfluenceCoeffs> load_influence_coeffs(const std::string& path);
bool save_process_tensor(const std::string& path, const ProcessTensor& pt);
std::optional<ProcessTensor> load_process_tensor(const std::string& path);

// eta_coefficients with an in-process memo and the optional disk cache.
InfluenceCoeffs cached_eta_coefficients(const PhononSpec& spec, double dt, int n_c);

}  // namespace qdcav
