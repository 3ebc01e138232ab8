#include "qrep/phase_noise.hpp"
#include "qrep/repeater_sim.hpp"
#include "qrep/verify.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace qrep;

namespace {

sim::RepeaterConfig repeater() {
    sim::RepeaterConfig c;
    c.purification_schedule = {{0, 1}, {3, 1}, {6, 1}};
    c.trials = 20000;
    return c;
}

void BM_MonteCarlo_Serial(benchmark::State& state) {
    const auto c = repeater();
    for (auto _ : state) benchmark::DoNotOptimize(sim::monte_carlo_run_serial(c).total_time.mean);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.trials));
}

void BM_MonteCarlo_Parallel(benchmark::State& state) {
    const auto c = repeater();
    for (auto _ : state) benchmark::DoNotOptimize(sim::monte_carlo_run(c).total_time.mean);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.trials));
}

const std::vector<phase::SegmentNoise> kSegments(8, phase::SegmentNoise{0.2, 0.0});
constexpr std::uint64_t kSamples = 1 << 20;

void BM_PhaseFidelity_Serial(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(phase::accumulated_phase_fidelity_serial(kSegments, kSamples, 1).mean);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(kSamples));
}

void BM_PhaseFidelity_Parallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(phase::accumulated_phase_fidelity(kSegments, kSamples, 1).mean);
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(kSamples));
}

void BM_Verify_Serial(benchmark::State& state) {
    verify::Options o;
    o.parallel = false;
    for (auto _ : state) benchmark::DoNotOptimize(verify::run(o).max_deviation);
}

void BM_Verify_Parallel(benchmark::State& state) {
    verify::Options o;
    for (auto _ : state) benchmark::DoNotOptimize(verify::run(o).max_deviation);
}

}  // namespace

BENCHMARK(BM_MonteCarlo_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarlo_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PhaseFidelity_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PhaseFidelity_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Verify_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Verify_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
