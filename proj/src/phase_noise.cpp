#include "qrep/phase_noise.hpp"

#include "qrep/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qrep::phase {
namespace {

constexpr std::uint64_t kChunk = 8192;

struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double total = na + nb;
        mean += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }
};

void check_segments(std::span<const SegmentNoise> segments, std::uint64_t samples) {
    if (samples == 0) throw std::invalid_argument("samples must be at least 1");
    for (const auto& s : segments)
        if (!(s.sigma >= 0.0) || !std::isfinite(s.mean))
            throw std::invalid_argument("segment sigma must be >= 0 and mean finite");
}

Moments run_chunk(std::span<const SegmentNoise> segments, std::uint64_t chunk, std::uint64_t count,
                  std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, chunk));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Moments m;
    for (std::uint64_t i = 0; i < count; ++i) {
        double total = 0.0;
        for (const auto& s : segments) total += s.sigma > 0.0 ? s.mean + s.sigma * gauss(rng) : s.mean;
        const double c = std::cos(0.5 * total);
        m.add(c * c);
    }
    return m;
}

FidelityEstimate finish(const Moments& m) {
    FidelityEstimate e;
    e.samples = m.n;
    e.mean = m.mean;
    e.std = m.n > 1 ? std::sqrt(m.m2 / static_cast<double>(m.n - 1)) : 0.0;
    return e;
}

}  // namespace

double ChannelSpec::transmission() const { return std::pow(10.0, -loss_db_per_km * length_km / 10.0); }

double ChannelSpec::classical_time() const { return length_km * 1e3 / kSpeedOfLight; }

void ChannelSpec::validate() const {
    if (!(length_km > 0.0)) throw std::invalid_argument("length_km must be positive");
    if (!(loss_db_per_km >= 0.0)) throw std::invalid_argument("loss_db_per_km must be non-negative");
    if (!(wavelength_um > 0.0)) throw std::invalid_argument("wavelength_um must be positive");
}

PhaseBudget jitter_budget(const ChannelSpec& channel, double delta_phi_max) {
    channel.validate();
    if (!(delta_phi_max > 0.0 && delta_phi_max <= 2.0 * std::numbers::pi))
        throw std::invalid_argument("delta_phi_max must lie in (0, 2pi]");
    PhaseBudget b;
    b.delta_phi_max = delta_phi_max;
    b.delta_x_max = delta_phi_max / (2.0 * std::numbers::pi) * channel.wavelength_um * 1e-6;
    b.delta_t_max = b.delta_x_max / kSpeedOfLight;
    return b;
}

double generation_duration(const ChannelSpec& channel, double chi) {
    channel.validate();
    if (!(chi > 0.0 && chi <= 1.0)) throw std::invalid_argument("chi must lie in (0, 1]");
    return channel.classical_time() / (chi * channel.transmission());
}

double two_photon_robustness_ratio(double wavelength_um, double coherence_length_m) {
    if (!(wavelength_um > 0.0) || !(coherence_length_m > 0.0))
        throw std::invalid_argument("wavelength and coherence length must be positive");
    return coherence_length_m / (wavelength_um * 1e-6);
}

FidelityEstimate accumulated_phase_fidelity(std::span<const SegmentNoise> segments, std::uint64_t samples,
                                            std::uint64_t seed) {
    check_segments(segments, samples);
    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<Moments> parts(chunks);
    const long n = static_cast<long>(chunks);
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n; ++c) {
        const auto k = static_cast<std::uint64_t>(c);
        parts[c] = run_chunk(segments, k, std::min(kChunk, samples - k * kChunk), seed);
    }
    Moments all;
    for (const auto& p : parts) all.merge(p);
    return finish(all);
}

FidelityEstimate accumulated_phase_fidelity_serial(std::span<const SegmentNoise> segments,
                                                   std::uint64_t samples, std::uint64_t seed) {
    check_segments(segments, samples);
    Moments all;
    for (std::uint64_t k = 0; k * kChunk < samples; ++k)
        all.merge(run_chunk(segments, k, std::min(kChunk, samples - k * kChunk), seed));
    return finish(all);
}

FidelityEstimate accumulated_phase_fidelity(const std::vector<double>& sigmas, std::uint64_t samples,
                                            std::uint64_t seed) {
    std::vector<SegmentNoise> segments;
    segments.reserve(sigmas.size());
    for (double s : sigmas) segments.push_back({s, 0.0});
    return accumulated_phase_fidelity(std::span<const SegmentNoise>(segments), samples, seed);
}

double dlcz_repeat_until_success_time(std::span<const double> segment_probs, double t1) {
    double prod = 1.0;
    for (double p : segment_probs) {
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("segment probabilities must lie in (0, 1]");
        prod *= p;
    }
    return t1 / prod;
}

}  // namespace qrep::phase
