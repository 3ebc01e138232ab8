#pragma once

// Phase-stability budgets for single-photon interference, duration of the
// generation step, and the accumulated phase along a nested chain.

#include <cstdint>
#include <span>
#include <vector>

namespace qrep::phase {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

enum class Medium { fiber, free_space };

struct ChannelSpec {
    double length_km = 10.0;
    double loss_db_per_km = 2.0;
    Medium medium = Medium::fiber;
    double wavelength_um = 1.0;

    double transmission() const;          // 10^(-alpha L / 10)
    double classical_time() const;        // L / c
    void validate() const;
};

struct PhaseBudget {
    double delta_phi_max = 0.0;  // rad
    double delta_x_max = 0.0;    // m
    double delta_t_max = 0.0;    // s
};

PhaseBudget jitter_budget(const ChannelSpec& channel, double delta_phi_max);

// t0 = T_cc / (chi * transmission)
double generation_duration(const ChannelSpec& channel, double chi);

double two_photon_robustness_ratio(double wavelength_um, double coherence_length_m);

// Per-segment phase difference phi_u - phi_d ~ N(mean, sigma).
struct SegmentNoise {
    double sigma = 0.0;
    double mean = 0.0;
};

struct FidelityEstimate {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation of cos^2(dPhi/2)
    std::uint64_t samples = 0;
};

// Samples are processed in fixed-size chunks with per-chunk seeds; the
// parallel and serial versions return bit-identical results.
FidelityEstimate accumulated_phase_fidelity(std::span<const SegmentNoise> segments, std::uint64_t samples,
                                            std::uint64_t seed);
FidelityEstimate accumulated_phase_fidelity_serial(std::span<const SegmentNoise> segments,
                                                   std::uint64_t samples, std::uint64_t seed);

// Convenience overload: zero-mean segments with the given sigmas.
FidelityEstimate accumulated_phase_fidelity(const std::vector<double>& sigmas, std::uint64_t samples,
                                            std::uint64_t seed);

// t4 = t1 / prod(p_i)
double dlcz_repeat_until_success_time(std::span<const double> segment_probs, double t1);

}  // namespace qrep::phase
