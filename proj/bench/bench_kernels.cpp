// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <numeric>
#include <random>
#include <vector>

#include "credeval/credal.hpp"
#include "credeval/evaluator.hpp"

using namespace credeval;

namespace {

ProbabilityVector draw(std::mt19937_64& rng, int n) {
    std::exponential_distribution<double> expo(1.0);
    ProbabilityVector p(n);
    for (auto& v : p) v = expo(rng);
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= s;
    return p;
}

struct Batch {
    std::vector<PredictionRecord> preds;
    std::vector<int> labels;
};

Batch make_batch(int instances, int samples, int classes) {
    std::mt19937_64 rng(7);
    Batch b;
    for (int i = 0; i < instances; ++i) {
        std::vector<ProbabilityVector> rows;
        for (int k = 0; k < samples; ++k) rows.push_back(draw(rng, classes));
        b.preds.push_back({i, SampleSet(LabelSpace(classes), rows)});
        b.labels.push_back(std::uniform_int_distribution<int>(0, classes - 1)(rng));
    }
    return b;
}

const Batch& batch() {
    static const Batch b = make_batch(500, 100, 10);
    return b;
}

MassFunction dense_mass(int n) {
    std::mt19937_64 rng(11);
    std::exponential_distribution<double> expo(1.0);
    std::vector<FocalElement> focal;
    double total = 0.0;
    for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << n); bits += 3) {
        focal.push_back({SubsetMask::from_bits(bits), expo(rng)});
        total += focal.back().mass;
    }
    for (auto& f : focal) f.mass /= total;
    return MassFunction(LabelSpace(n), focal);
}

void BM_EvaluateSerial(benchmark::State& state) {
    const auto& b = batch();
    EvalConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch_serial(b.preds, b.labels, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(b.preds.size()));
}

void BM_EvaluateParallel(benchmark::State& state) {
    const auto& b = batch();
    EvalConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(b.preds, b.labels, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(b.preds.size()));
}

void BM_VerticesSerial(benchmark::State& state) {
    const auto m = dense_mass(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(vertices_exact(m));
}

void BM_VerticesParallel(benchmark::State& state) {
    const auto m = dense_mass(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(vertices_exact_parallel(m));
}

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_VerticesSerial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerticesParallel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
