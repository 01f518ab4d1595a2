// Serial reference against the OpenMP kernels on realistic inputs
// (30000-sample Gaussian, 7 segments, 32-member population).
#include <benchmark/benchmark.h>

#include <vector>

#include "cubicpulse/kernels.hpp"
#include "cubicpulse/pulse.hpp"
#include "cubicpulse/qafit.hpp"
#include "cubicpulse/rng.hpp"

using namespace cubicpulse;

namespace {

const Pulse& gaussian() {
    static const Pulse p = gen_gaussian(30000, 15000, 8e6, 32767, std::nullopt);
    return p;
}

QuantizedSegment long_segment() {
    const auto fit = fit_float(gaussian(), uniform_knots(7, 30000));
    return quantize_segment(to_bowler(fit.polys[3]), {}, 4286).segment;
}

std::vector<QuantizedSegment> population(std::size_t n) {
    const QuantizedSegment base = long_segment();
    Rng rng(7);
    std::vector<QuantizedSegment> pop(n, base);
    for (auto& s : pop) {
        s.beta_raw += rng.between(-4096, 4096);
        s.gamma_raw += rng.between(-4096, 4096);
        s.delta_raw += rng.between(-64, 64);
    }
    return pop;
}

template <bool Parallel>
void BM_SegmentOutputs(benchmark::State& st) {
    const QuantizedSegment s = long_segment();
    std::vector<std::int64_t> out(s.n_samples);
    for (auto _ : st) {
        if constexpr (Parallel)
            kernels::segment_outputs(s, {}, out);
        else
            kernels::segment_outputs_serial(s, {}, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Parallel>
void BM_SquaredErrorSum(benchmark::State& st) {
    const auto& p = gaussian();
    std::vector<std::int64_t> out(p.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::int64_t>(p.samples[i]);
    for (auto _ : st) {
        double v = Parallel ? kernels::squared_error_sum(p.samples, out)
                            : kernels::squared_error_sum_serial(p.samples, out);
        benchmark::DoNotOptimize(v);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(out.size()));
}

template <bool Parallel>
void BM_ScorePopulation(benchmark::State& st) {
    const auto pop = population(32);
    const auto& p = gaussian();
    const std::span<const double> target(p.samples.data() + 12857, pop[0].n_samples);
    std::vector<double> cost(pop.size());
    for (auto _ : st) {
        if constexpr (Parallel)
            kernels::score_population(pop, target, {}, 0.0, cost);
        else
            kernels::score_population_serial(pop, target, {}, 0.0, cost);
        benchmark::DoNotOptimize(cost.data());
    }
}

template <bool Parallel>
void BM_SegmentReductions(benchmark::State& st) {
    const auto& p = gaussian();
    const auto part = uniform_knots(static_cast<std::size_t>(st.range(0)), p.size());
    for (auto _ : st) {
        auto r = Parallel ? kernels::segment_reductions(p.samples, part)
                          : kernels::segment_reductions_serial(p.samples, part);
        benchmark::DoNotOptimize(r.data());
    }
}

} // namespace

BENCHMARK(BM_SegmentOutputs<false>)->Name("segment_outputs/serial");
BENCHMARK(BM_SegmentOutputs<true>)->Name("segment_outputs/omp");
BENCHMARK(BM_SquaredErrorSum<false>)->Name("squared_error_sum/serial");
BENCHMARK(BM_SquaredErrorSum<true>)->Name("squared_error_sum/omp");
BENCHMARK(BM_ScorePopulation<false>)->Name("score_population/serial");
BENCHMARK(BM_ScorePopulation<true>)->Name("score_population/omp");
BENCHMARK(BM_SegmentReductions<false>)->Name("segment_reductions/serial")->Arg(7)->Arg(64);
BENCHMARK(BM_SegmentReductions<true>)->Name("segment_reductions/omp")->Arg(7)->Arg(64);

BENCHMARK_MAIN();
