#pragma once

// Nested repeater scheduling. A configuration is compiled into a plan: the
// level-0 generation step followed by an ordered list of swap and
// purification stages with their success probabilities, classical
// communication times and the mixture state after each stage. The analytic
// recursion and the Monte-Carlo both run off the same plan.

#include "qrep/ensemble_model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qrep::sim {

enum class GenerationMode { remote_generation, local_generation_remote_swap };

struct PurificationRound {
    int level = 0;
    int rounds = 1;
};

struct RepeaterConfig {
    double L0_km = 10.0;
    double total_length_km = 1280.0;
    double chi = 1e-3;
    bool chi_from_length = false;  // chi = L0 / L
    double loss_db_per_km = 0.1;
    double eta_r = 0.98;
    double eta1 = 0.99;
    double eta2 = -1.0;  // negative: 1 - (1 - eta1)^2
    double p_r = 1.0;
    double t_gen_local = 100e-6;        // s, one local generation slot
    double local_success_prob = 1.0;    // per local slot
    double F_initial = 0.88;
    std::vector<PurificationRound> purification_schedule;
    GenerationMode mode = GenerationMode::local_generation_remote_swap;
    std::uint64_t seed = 1;
    std::uint64_t trials = 10000;

    int levels() const;                  // n with L = 2^n L0
    double effective_chi() const;
    double effective_eta2() const;
    double classical_time() const;       // T_cc = L0 / c
    double segment_transmission() const; // 10^(-alpha L0 / 10)
    void validate() const;
};

enum class StageKind { swap, purify };

struct Stage {
    int level = 0;
    StageKind kind = StageKind::swap;
    double success = 0.0;
    double comm_time = 0.0;  // classical signalling charged per attempt
    ensemble::MixtureState state_after;
    bool small_chi_violated = false;
};

struct Plan {
    int levels = 0;
    double slot = 0.0;           // level-0 attempt slot
    double p_gen = 1.0;          // level-0 success per slot
    double T0 = 0.0;             // slot / p_gen
    ensemble::MixtureState initial;
    std::vector<Stage> stages;
};

Plan build_plan(const RepeaterConfig& config);

struct LevelTiming {
    int level = 0;
    double success = 0.0;  // swap success p_{s_j}; 1 at level 0
    double time = 0.0;     // T_{s_j}, including purification at that level
};

struct AnalyticResult {
    std::vector<LevelTiming> per_level;
    std::vector<double> stage_times;  // time after each stage
    double total_time = 0.0;          // exact recursion
    double closed_form_time = 0.0;    // T0 * prod 1/p
    ensemble::MixtureState final_state;
};

AnalyticResult analytic_time_recursion(const Plan& plan);
AnalyticResult analytic_time_recursion(const RepeaterConfig& config);

struct TimeStats {
    double mean = 0.0;
    double std = 0.0;
    double stderr_mean = 0.0;
    double p05 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct LevelReport {
    int level = 0;
    double success = 0.0;
    double analytic_time = 0.0;
    double simulated_mean_time = 0.0;
};

struct StageReport {
    int level = 0;
    StageKind kind = StageKind::swap;
    double success = 0.0;
    double comm_time = 0.0;
    double analytic_time = 0.0;
    double simulated_mean_time = 0.0;
    double p2 = 0.0;  // normalized weights after the stage
    double p1 = 0.0;
    double p0 = 0.0;
    double F = 0.0;
};

struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    TimeStats total_time;
    double analytic_total_time = 0.0;
    double closed_form_total_time = 0.0;
    double success_probability = 0.0;  // normalized p2 of the final pair
    double final_fidelity = 0.0;
    ensemble::MixtureState final_state;
    std::vector<LevelReport> per_level;
    std::vector<StageReport> stages;
    std::map<std::uint64_t, std::uint64_t> attempts_histogram;  // level-0 attempts per sample
    double mean_generation_attempts = 0.0;
    bool small_chi_violated = false;
};

// Hierarchical pool resampling: the level-0 pool holds `trials` generation
// times; every stage builds a new pool whose samples draw their two inputs
// per attempt from the previous pool. Sample i of stage s uses a stream
// seeded from (seed, s, i), so both versions agree bit for bit.
SimReport monte_carlo_run(const RepeaterConfig& config);
SimReport monte_carlo_run_serial(const RepeaterConfig& config);
SimReport simulate_plan(const Plan& plan, std::uint64_t trials, std::uint64_t seed, bool parallel);

// Scalar fields accepted by sweep.
const std::vector<std::string>& sweep_axes();
void set_axis(RepeaterConfig& config, const std::string& axis, double value);

// Run i uses seed + i; a one-value sweep reproduces monte_carlo_run.
std::vector<SimReport> sweep(const RepeaterConfig& base, const std::string& axis, const std::vector<double>& values);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qrep::sim
