#pragma once

#include <span>

#include "credeval/credal.hpp"
#include "credeval/divergence.hpp"
#include "credeval/setfn.hpp"

namespace credeval {

// Above this many classes the minimum-entropy search switches from exact
// polytope vertex enumeration to greedy corners plus pairwise exchange.
inline constexpr int kExactMinEntropyCap = 10;

struct EntropyBounds {
    double lower;
    double upper;
};

// Dubois-Prade non-specificity: sum_A m(A) log|A|.
double ns_dubois(const MassFunction& m, LogBase base = {});
// Smets: sum over nonempty A with Q(A) > 0 of log(1/Q(A)). Subsets with zero
// commonality are skipped. Needs N <= kMaxDenseClasses.
double ns_smets(const MassFunction& m, LogBase base = {});
// Körner: sum_A m(A) |A|.
double ns_korner(const MassFunction& m);
// Pal specificity: sum_A m(A) / |A|.
double spec_pal(const MassFunction& m);

double shannon_entropy(std::span<const double> p, LogBase base = {});

// Maximum and minimum Shannon entropy over {p : lower <= p <= upper, sum p = 1}.
EntropyBounds entropy_bounds(const IntervalPrediction& ip, LogBase base = {});
// Distribution attaining the maximum entropy (water-filling).
ProbabilityVector max_entropy_distribution(const IntervalPrediction& ip);
double credal_uncertainty(const IntervalPrediction& ip, LogBase base = {});

// H(mean sample) - mean H(sample).
double mutual_information(const SampleSet& s, LogBase base = {});

}  // namespace credeval
