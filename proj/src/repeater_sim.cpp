#include "qrep/repeater_sim.hpp"

#include "qrep/phase_noise.hpp"
#include "qrep/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qrep::sim {
namespace {

void check_unit(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

std::uint64_t geometric_attempts(std::mt19937_64& rng, double p) {
    if (p >= 1.0) return 1;
    std::geometric_distribution<std::uint64_t> g(p);
    return g(rng) + 1;
}

double percentile(const std::vector<double>& sorted, double q) {
    const auto n = sorted.size();
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    return sorted[std::clamp<std::size_t>(rank, 1, n) - 1];
}

TimeStats summarize(const std::vector<double>& xs) {
    TimeStats t;
    const double n = static_cast<double>(xs.size());
    // shifted by the first sample so constant data gives exactly zero spread
    const double k = xs.front();
    double sum = 0.0;
    for (double x : xs) sum += x - k;
    const double shift = sum / n;
    t.mean = k + shift;
    double ss = 0.0;
    for (double x : xs) ss += (x - k - shift) * (x - k - shift);
    t.std = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    t.stderr_mean = t.std / std::sqrt(n);
    std::vector<double> s = xs;
    std::sort(s.begin(), s.end());
    t.p05 = percentile(s, 0.05);
    t.p50 = percentile(s, 0.50);
    t.p95 = percentile(s, 0.95);
    t.min = s.front();
    t.max = s.back();
    return t;
}

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

}  // namespace

int RepeaterConfig::levels() const {
    const double ratio = total_length_km / L0_km;
    const double n = std::round(std::log2(ratio));
    return static_cast<int>(n);
}

double RepeaterConfig::effective_chi() const { return chi_from_length ? L0_km / total_length_km : chi; }

double RepeaterConfig::effective_eta2() const { return eta2 < 0.0 ? 1.0 - (1.0 - eta1) * (1.0 - eta1) : eta2; }

double RepeaterConfig::classical_time() const { return L0_km * 1e3 / phase::kSpeedOfLight; }

double RepeaterConfig::segment_transmission() const { return std::pow(10.0, -loss_db_per_km * L0_km / 10.0); }

void RepeaterConfig::validate() const {
    if (!(L0_km > 0.0)) throw std::invalid_argument("L0_km must be positive");
    if (!(total_length_km > 0.0)) throw std::invalid_argument("total_length_km must be positive");
    const double ratio = total_length_km / L0_km;
    const double n = std::round(std::log2(ratio));
    if (n < 1.0 || std::abs(ratio - std::exp2(n)) > 1e-9 * ratio)
        throw std::invalid_argument("total_length_km must equal 2^n * L0_km with integer n >= 1");
    const double c = effective_chi();
    if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("chi must lie in [0,1)");
    if (mode == GenerationMode::remote_generation && !(c > 0.0))
        throw std::invalid_argument("chi must be positive for remote generation");
    if (!(loss_db_per_km >= 0.0)) throw std::invalid_argument("loss_db_per_km must be non-negative");
    check_unit(eta_r, "eta_r");
    check_unit(eta1, "eta1");
    check_unit(effective_eta2(), "eta2");
    check_unit(p_r, "p_r");
    check_unit(F_initial, "F_initial");
    if (!(local_success_prob > 0.0 && local_success_prob <= 1.0))
        throw std::invalid_argument("local_success_prob must lie in (0,1]");
    if (!(t_gen_local > 0.0)) throw std::invalid_argument("t_gen_local must be positive");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    for (const auto& r : purification_schedule) {
        if (r.level < 0 || r.level > n)
            throw std::invalid_argument("purification_schedule level " + std::to_string(r.level) +
                                        " outside [0, " + std::to_string(static_cast<int>(n)) + "]");
        if (r.rounds < 1) throw std::invalid_argument("purification_schedule rounds must be >= 1");
    }
}

Plan build_plan(const RepeaterConfig& config) {
    config.validate();
    Plan plan;
    plan.levels = config.levels();
    const double chi = config.effective_chi();
    const double tcc = config.classical_time();
    const double eta2 = config.effective_eta2();

    if (config.mode == GenerationMode::remote_generation) {
        plan.slot = tcc;
        plan.p_gen = chi * chi * config.eta1 * config.eta1 * config.segment_transmission();
    } else {
        plan.slot = config.t_gen_local;
        plan.p_gen = config.local_success_prob;
    }
    if (!(plan.p_gen > 0.0)) throw std::invalid_argument("generation success probability is zero");
    plan.T0 = plan.slot / plan.p_gen;

    ensemble::MixtureState s{1.0, 0.0, 0.0, chi, chi, config.F_initial};
    s = normalize(s);
    s.F = config.F_initial;
    plan.initial = s;

    const ensemble::EfficiencyParams base{config.eta_r, config.eta1, eta2};
    auto purify = [&](int level) {
        int rounds = 0;
        for (const auto& r : config.purification_schedule)
            if (r.level == level) rounds += r.rounds;
        for (int k = 0; k < rounds; ++k) {
            const auto p = ensemble::purification_coefficients(s, s.F, base);
            Stage st;
            st.level = level;
            st.kind = StageKind::purify;
            st.success = p.coefficients.success;
            st.comm_time = std::ldexp(tcc, level);
            if (!(st.success > 0.0)) throw std::invalid_argument("purification success probability is zero");
            s = normalize(p.unnormalized);
            s.level = level;
            st.state_after = s;
            plan.stages.push_back(st);
        }
    };

    purify(0);
    for (int j = 1; j <= plan.levels; ++j) {
        ensemble::EfficiencyParams e = base;
        // locally generated pairs: the first swap carries each photon over L0/2
        if (config.mode == GenerationMode::local_generation_remote_swap && j == 1)
            e.eta_r *= std::sqrt(config.segment_transmission());
        const auto r = ensemble::connect_step(s, chi, e);
        Stage st;
        st.level = j;
        st.kind = StageKind::swap;
        st.success = r.success;
        st.comm_time = std::ldexp(tcc, j - 1);
        st.small_chi_violated = r.small_chi_violated;
        if (!(st.success > 0.0)) throw std::invalid_argument("swap success probability is zero at level " + std::to_string(j));
        s = r.normalized;
        st.state_after = s;
        plan.stages.push_back(st);
        purify(j);
    }
    return plan;
}

AnalyticResult analytic_time_recursion(const Plan& plan) {
    AnalyticResult out;
    double T = plan.T0;
    double closed = plan.T0;
    out.per_level.push_back({0, 1.0, T});
    out.final_state = plan.initial;
    for (const auto& st : plan.stages) {
        T = (T + st.comm_time) / st.success;
        closed /= st.success;
        out.stage_times.push_back(T);
        if (st.kind == StageKind::swap) out.per_level.push_back({st.level, st.success, T});
        else out.per_level.back().time = T;
        out.final_state = st.state_after;
    }
    out.total_time = T;
    out.closed_form_time = closed;
    return out;
}

AnalyticResult analytic_time_recursion(const RepeaterConfig& config) {
    return analytic_time_recursion(build_plan(config));
}

SimReport simulate_plan(const Plan& plan, std::uint64_t trials, std::uint64_t seed, bool parallel) {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    const long n = static_cast<long>(trials);
    std::vector<double> pool(trials), next(trials);
    std::vector<std::uint64_t> attempts(trials);

    auto generate = [&](long i) {
        std::mt19937_64 rng(derive_seed(seed, 0, static_cast<std::uint64_t>(i)));
        attempts[i] = geometric_attempts(rng, plan.p_gen);
        pool[i] = static_cast<double>(attempts[i]) * plan.slot;
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) generate(i);
    } else {
        for (long i = 0; i < n; ++i) generate(i);
    }

    const auto analytic = analytic_time_recursion(plan);
    SimReport rep;
    rep.trials = trials;
    rep.seed = seed;
    std::vector<double> stage_means;
    stage_means.push_back(mean_of(pool));

    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
        const Stage& st = plan.stages[s];
        auto step = [&](long i) {
            std::mt19937_64 rng(derive_seed(seed, s + 1, static_cast<std::uint64_t>(i)));
            std::uniform_int_distribution<std::uint64_t> pick(0, trials - 1);
            const std::uint64_t tries = geometric_attempts(rng, st.success);
            double t = 0.0;
            for (std::uint64_t k = 0; k < tries; ++k) {
                const double a = pool[pick(rng)];
                const double b = pool[pick(rng)];
                t += std::max(a, b) + st.comm_time;
            }
            next[i] = t;
        };
        if (parallel) {
#pragma omp parallel for schedule(static)
            for (long i = 0; i < n; ++i) step(i);
        } else {
            for (long i = 0; i < n; ++i) step(i);
        }
        pool.swap(next);
        stage_means.push_back(mean_of(pool));
    }

    rep.total_time = summarize(pool);
    rep.analytic_total_time = analytic.total_time;
    rep.closed_form_total_time = analytic.closed_form_time;
    rep.final_state = analytic.final_state;
    rep.success_probability = analytic.final_state.p2;
    rep.final_fidelity = analytic.final_state.F;

    rep.per_level.push_back({0, 1.0, plan.T0, stage_means[0]});
    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
        const Stage& st = plan.stages[s];
        StageReport sr;
        sr.level = st.level;
        sr.kind = st.kind;
        sr.success = st.success;
        sr.comm_time = st.comm_time;
        sr.analytic_time = analytic.stage_times[s];
        sr.simulated_mean_time = stage_means[s + 1];
        sr.p2 = st.state_after.p2;
        sr.p1 = st.state_after.p1;
        sr.p0 = st.state_after.p0;
        sr.F = st.state_after.F;
        rep.stages.push_back(sr);
        rep.small_chi_violated = rep.small_chi_violated || st.small_chi_violated;
        if (st.kind == StageKind::swap) {
            rep.per_level.push_back({st.level, st.success, sr.analytic_time, sr.simulated_mean_time});
        } else {
            rep.per_level.back().analytic_time = sr.analytic_time;
            rep.per_level.back().simulated_mean_time = sr.simulated_mean_time;
        }
    }
    double total_attempts = 0.0;
    for (auto a : attempts) {
        ++rep.attempts_histogram[a];
        total_attempts += static_cast<double>(a);
    }
    rep.mean_generation_attempts = total_attempts / static_cast<double>(trials);
    return rep;
}

SimReport monte_carlo_run(const RepeaterConfig& config) {
    return simulate_plan(build_plan(config), config.trials, config.seed, true);
}

SimReport monte_carlo_run_serial(const RepeaterConfig& config) {
    return simulate_plan(build_plan(config), config.trials, config.seed, false);
}

const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> axes{"L0_km", "total_length_km", "chi", "loss_db_per_km", "eta_r",
                                               "eta1", "eta2", "p_r", "t_gen_local", "local_success_prob",
                                               "F_initial"};
    return axes;
}

void set_axis(RepeaterConfig& c, const std::string& axis, double v) {
    if (axis == "L0_km") c.L0_km = v;
    else if (axis == "total_length_km") c.total_length_km = v;
    else if (axis == "chi") c.chi = v;
    else if (axis == "loss_db_per_km") c.loss_db_per_km = v;
    else if (axis == "eta_r") c.eta_r = v;
    else if (axis == "eta1") c.eta1 = v;
    else if (axis == "eta2") c.eta2 = v;
    else if (axis == "p_r") c.p_r = v;
    else if (axis == "t_gen_local") c.t_gen_local = v;
    else if (axis == "local_success_prob") c.local_success_prob = v;
    else if (axis == "F_initial") c.F_initial = v;
    else throw std::invalid_argument("unknown sweep axis '" + axis + "'");
}

std::vector<SimReport> sweep(const RepeaterConfig& base, const std::string& axis, const std::vector<double>& values) {
    RepeaterConfig probe = base;
    set_axis(probe, axis, 0.0);  // rejects unknown axes even for an empty list
    std::vector<SimReport> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        RepeaterConfig c = base;
        set_axis(c, axis, values[i]);
        c.seed = base.seed + i;
        out.push_back(monte_carlo_run(c));
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qrep::sim
