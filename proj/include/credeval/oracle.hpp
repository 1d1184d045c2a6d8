#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credeval/credal.hpp"
#include "credeval/setfn.hpp"
#include "credeval/uncertainty.hpp"

// Straight-line reference implementations for small label spaces. They share
// no code with the optimized paths beyond the value types, and are written for
// readability rather than speed.
namespace credeval::oracle {

inline constexpr int kMaxLowerClasses = 12;
inline constexpr int kMaxVertexClasses = 6;
inline constexpr int kMaxEntropyClasses = 3;

// Full-powerset lower probability by summing every subset of every sample.
LowerProbability brute_lower_probability(const SampleSet& s);
// Alternating sum over all subsets, negatives clamped, renormalized.
MassFunction brute_mobius(const LowerProbability& lp);
// All N! permutations; each class takes the mass of focal sets containing it
// and none of the classes placed before it.
CredalVertices brute_vertices(const MassFunction& m);
// Grid search over the feasible region. Bound breakpoints are added to the
// grid so polytope vertices are always visited.
EntropyBounds brute_entropy_bounds(const IntervalPrediction& ip, double step = 1e-3);

struct BatchReport {
    std::string name;
    int cases = 0;
    int failures = 0;
    double max_error = 0.0;
    std::string first_failure;
};

struct SelfTestReport {
    std::vector<BatchReport> batches;
    double seconds = 0.0;
    bool passed() const;
};

// Three property batches with a fixed seed: sample-set pipeline vs brute
// composition, approximate vertices inside the brute vertex set, and entropy
// bounds vs grid search. max_classes in [3, 6].
SelfTestReport self_test(int max_classes = kMaxVertexClasses, std::uint64_t seed = 20240611);

}  // namespace credeval::oracle
