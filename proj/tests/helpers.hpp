#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "credeval/credal.hpp"
#include "credeval/setfn.hpp"

namespace testutil {

using namespace credeval;

inline SubsetMask mask(std::uint64_t bits) { return SubsetMask::from_bits(bits); }

// m = {a:0.4, b:0.3, ab:0.3}, the running two-class example
inline MassFunction fixture_mass() {
    return MassFunction(LabelSpace(2), {{mask(0b01), 0.4}, {mask(0b10), 0.3}, {mask(0b11), 0.3}});
}

inline SampleSet fixture_samples() { return SampleSet(LabelSpace(2), std::vector<ProbabilityVector>{{0.7, 0.3}, {0.4, 0.6}}); }

inline ProbabilityVector random_distribution(std::mt19937_64& rng, int n, double zero_rate = 0.15) {
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ProbabilityVector p(n);
    double sum = 0.0;
    for (auto& v : p) {
        v = unit(rng) < zero_rate ? 0.0 : expo(rng);
        sum += v;
    }
    if (sum == 0.0) {
        p[0] = 1.0;
        return p;
    }
    for (auto& v : p) v /= sum;
    return p;
}

inline SampleSet random_samples(std::mt19937_64& rng, int n, int k) {
    std::vector<ProbabilityVector> rows;
    for (int i = 0; i < k; ++i) rows.push_back(random_distribution(rng, n));
    return SampleSet(LabelSpace(n), rows);
}

inline MassFunction random_mass(std::mt19937_64& rng, int n, int max_focal = 10) {
    std::uniform_int_distribution<std::uint64_t> bits(1, (std::uint64_t{1} << n) - 1);
    std::uniform_int_distribution<int> count(1, std::min<int>(max_focal, (1 << n) - 1));
    std::exponential_distribution<double> expo(1.0);
    const int k = count(rng);
    std::vector<std::uint64_t> chosen;
    while (static_cast<int>(chosen.size()) < k) {
        auto b = bits(rng);
        if (std::find(chosen.begin(), chosen.end(), b) == chosen.end()) chosen.push_back(b);
    }
    std::vector<FocalElement> focal;
    double sum = 0.0;
    for (auto b : chosen) {
        focal.push_back({mask(b), expo(rng) + 1e-3});
        sum += focal.back().mass;
    }
    for (auto& f : focal) f.mass /= sum;
    return MassFunction(LabelSpace(n), focal);
}

inline IntervalPrediction random_intervals(std::mt19937_64& rng, int n, double spread = 0.3) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto p = random_distribution(rng, n);
    ProbabilityVector lo(n), hi(n);
    for (int c = 0; c < n; ++c) {
        lo[c] = std::max(0.0, p[c] - spread * unit(rng));
        hi[c] = std::min(1.0, p[c] + spread * unit(rng));
    }
    return IntervalPrediction(LabelSpace(n), lo, hi);
}

inline bool near(const ProbabilityVector& a, const ProbabilityVector& b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

// Same vertex set, order ignored.
inline bool same_vertices(const CredalVertices& v, const std::vector<ProbabilityVector>& expected,
                          double tol = 1e-9) {
    if (v.size() != expected.size()) return false;
    for (const auto& e : expected)
        if (!v.contains(e, tol)) return false;
    return true;
}

}  // namespace testutil
