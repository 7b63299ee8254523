#include "qdcav/process_tensor.hpp"

#include "qdcav/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <unordered_map>

namespace qdcav {

Complex influence_g(Complex eta, int alpha) {
    return eta * double(path_nu(alpha)) - std::conj(eta) * double(path_mu(alpha));
}

Complex influence_self_factor(Complex eta0, int alpha) {
    return std::exp(-double(path_channel(alpha)) * influence_g(eta0, alpha));
}

std::vector<int> path_channels() {
    std::vector<int> c(n_path_indices);
    for (int a = 0; a < n_path_indices; ++a) c[std::size_t(a)] = path_channel(a);
    return c;
}

std::vector<Complex> self_factors(const InfluenceCoeffs& coeffs) {
    std::vector<Complex> f(n_path_indices);
    for (int a = 0; a < n_path_indices; ++a)
        f[std::size_t(a)] = influence_self_factor(coeffs.eta[0], a);
    return f;
}

ChannelFactors lag_factors(const InfluenceCoeffs& coeffs, int max_lag) {
    ChannelFactors factors;
    const int lags = std::min(max_lag, coeffs.n_c);
    factors.lag.resize(std::size_t(lags));
    for (int k = 1; k <= lags; ++k) {
        auto& entry = factors.lag[std::size_t(k - 1)];
        entry[0].resize(n_path_indices);
        entry[1].resize(n_path_indices);
        for (int a = 0; a < n_path_indices; ++a) {
            const Complex g = influence_g(coeffs.eta[std::size_t(k)], a);
            entry[0][std::size_t(a)] = std::exp(-g);  // message d = +1
            entry[1][std::size_t(a)] = std::exp(g);   // message d = -1
        }
    }
    return factors;
}

Complex influence_weight_direct(const InfluenceCoeffs& coeffs,
                                const std::vector<int>& path) {
    Complex exponent = 0.0;
    const int n = static_cast<int>(path.size());
    for (int k = 0; k < n; ++k) {
        const int d = path_channel(path[std::size_t(k)]);
        for (int j = std::max(0, k - coeffs.n_c); j <= k; ++j)
            exponent += double(d) * influence_g(coeffs.eta[std::size_t(k - j)],
                                                path[std::size_t(j)]);
    }
    return std::exp(-exponent);
}

void validate(const CompressionConfig& comp) {
    if (!(comp.svd_threshold > 0.0) || !(comp.svd_threshold < 1.0))
        throw std::invalid_argument("CompressionConfig: svd_threshold must be in (0, 1)");
    if (comp.max_bond < 1)
        throw std::invalid_argument("CompressionConfig: max_bond must be >= 1");
}

ProcessTensor build_process_tensor(const InfluenceCoeffs& coeffs,
                                   const CompressionConfig& comp, int n_steps) {
    validate(comp);
    if (n_steps < 1)
        throw std::invalid_argument("build_process_tensor: n_steps must be >= 1");

    ProcessTensor pt;
    pt.dt = coeffs.dt;
    pt.n_c = coeffs.n_c;

    const int k_eff = std::min(coeffs.effective_memory(),
                               coeffs.lag_cutoff(0.25 * comp.svd_threshold));
    const bool trivial = std::abs(coeffs.eta[0]) == 0.0 && k_eff == 0;
    const auto channels = path_channels();
    const auto self = self_factors(coeffs);
    const ChannelFactors factors = lag_factors(coeffs, k_eff);

    for (int step = 0; step < n_steps; ++step) {
        SiteTensor site;
        site.blocks.assign(n_path_indices,
                           Matrix::Ones(step == 0 ? 1 : pt.sites.back().right(), 1));
        pt.sites.push_back(std::move(site));
        if (trivial) continue;
        apply_receiver(pt.sites, pt.sites.size() - 1, -1, channels, self, factors);
        compress(pt.sites, comp.svd_threshold, comp.max_bond, pt.stats);
    }
    return pt;
}

ProcessTensor build_process_tensor(const PhononSpec& spec, double dt, int n_c,
                                   const CompressionConfig& comp, int n_steps) {
    return build_process_tensor(cached_eta_coefficients(spec, dt, n_c), comp, n_steps);
}

// ---------------------------------------------------------------------------
// caching

namespace {

constexpr std::uint32_t coeffs_format_version = 1;
constexpr std::uint32_t pt_format_version = 1;

struct Fnv1a {
    std::uint64_t state = 1469598103934665603ull;

    void add_bytes(const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state ^= bytes[i];
            state *= 1099511628211ull;
        }
    }
    void add(double v) { add_bytes(&v, sizeof v); }
    void add(int v) { add_bytes(&v, sizeof v); }
    void add(bool v) { int x = v; add(x); }
};

void hash_spec(Fnv1a& h, const PhononSpec& spec) {
    h.add(spec.temperature_k);
    h.add(spec.a_e_nm);
    h.add(spec.a_h_nm);
    h.add(spec.d_e_ev);
    h.add(spec.d_h_ev);
    h.add(spec.density_kg_m3);
    h.add(spec.sound_velocity_m_s);
    h.add(spec.coupling_scale);
}

template <class T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return bool(in);
}

}  // namespace

std::optional<std::string> pt_cache_dir() {
    const char* dir = std::getenv("QDCAV_PT_CACHE");
    if (!dir || !*dir) return std::nullopt;
    return std::string(dir);
}

std::uint64_t coeffs_cache_key(const PhononSpec& spec, double dt, int n_c) {
    Fnv1a h;
    hash_spec(h, spec);
    h.add(dt);
    h.add(n_c);
    return h.state;
}

std::uint64_t pt_cache_key(const PhononSpec& spec, double dt, int n_c,
                           const CompressionConfig& comp, int n_steps) {
    Fnv1a h;
    hash_spec(h, spec);
    h.add(dt);
    h.add(n_c);
    h.add(comp.svd_threshold);
    h.add(comp.max_bond);
    h.add(n_steps);
    return h.state;
}

bool save_influence_coeffs(const std::string& path, const InfluenceCoeffs& coeffs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out.write("QDIC", 4);
    write_pod(out, coeffs_format_version);
    write_pod(out, coeffs.dt);
    write_pod(out, coeffs.n_c);
    for (const auto& e : coeffs.eta) write_pod(out, e);
    return bool(out);
}

std::optional<InfluenceCoeffs> load_influence_coeffs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    in.read(magic, 4);
    std::uint32_t version = 0;
    if (!in || std::memcmp(magic, "QDIC", 4) != 0 || !read_pod(in, version) ||
        version != coeffs_format_version)
        return std::nullopt;
    InfluenceCoeffs coeffs;
    if (!read_pod(in, coeffs.dt) || !read_pod(in, coeffs.n_c) || coeffs.n_c < 0)
        return std::nullopt;
    coeffs.eta.resize(std::size_t(coeffs.n_c) + 1);
    for (auto& e : coeffs.eta)
        if (!read_pod(in, e)) return std::nullopt;
    return coeffs;
}

bool save_process_tensor(const std::string& path, const ProcessTensor& pt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out.write("QDPT", 4);
    write_pod(out, pt_format_version);
    write_pod(out, pt.dt);
    write_pod(out, pt.n_c);
    write_pod(out, pt.n_steps());
    for (const auto& site : pt.sites) {
        const std::int64_t l = site.left(), r = site.right();
        const std::int32_t p = site.phys();
        write_pod(out, l);
        write_pod(out, r);
        write_pod(out, p);
        for (const auto& b : site.blocks)
            out.write(reinterpret_cast<const char*>(b.data()),
                      std::streamsize(sizeof(Complex)) * b.size());
    }
    return bool(out);
}

std::optional<ProcessTensor> load_process_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    in.read(magic, 4);
    std::uint32_t version = 0;
    if (!in || std::memcmp(magic, "QDPT", 4) != 0 || !read_pod(in, version) ||
        version != pt_format_version)
        return std::nullopt;
    ProcessTensor pt;
    int n_steps = 0;
    if (!read_pod(in, pt.dt) || !read_pod(in, pt.n_c) || !read_pod(in, n_steps) ||
        n_steps < 0)
        return std::nullopt;
    pt.sites.resize(std::size_t(n_steps));
    for (auto& site : pt.sites) {
        std::int64_t l = 0, r = 0;
        std::int32_t p = 0;
        if (!read_pod(in, l) || !read_pod(in, r) || !read_pod(in, p) || l < 0 ||
            r < 0 || p <= 0)
            return std::nullopt;
        site.blocks.assign(std::size_t(p), Matrix(l, r));
        for (auto& b : site.blocks) {
            in.read(reinterpret_cast<char*>(b.data()),
                    std::streamsize(sizeof(Complex)) * b.size());
            if (!in) return std::nullopt;
        }
    }
    return pt;
}

InfluenceCoeffs cached_eta_coefficients(const PhononSpec& spec, double dt, int n_c) {
    static std::mutex mutex;
    static std::unordered_map<std::uint64_t, InfluenceCoeffs> memo;

    const std::uint64_t key = coeffs_cache_key(spec, dt, n_c);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }

    std::optional<std::string> dir = pt_cache_dir();
    std::string file;
    if (dir) {
        std::error_code ec;
        std::filesystem::create_directories(*dir, ec);
        file = *dir + "/" + std::to_string(key) + ".qdic";
        if (auto cached = load_influence_coeffs(file)) {
            std::lock_guard<std::mutex> lock(mutex);
            memo.emplace(key, *cached);
            return *cached;
        }
    }

    InfluenceCoeffs coeffs = eta_coefficients(spec, dt, n_c);
    if (dir) save_influence_coeffs(file, coeffs);
    {
        std::lock_guard<std::mutex> lock(mutex);
        memo.emplace(key, coeffs);
    }
    return coeffs;
}

}  // namespace qdcav
