#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "credeval/label_space.hpp"
#include "credeval/setfn.hpp"

namespace credeval {

inline constexpr double kSampleSumTolerance = 1e-6;
inline constexpr double kVertexTolerance = 1e-9;
inline constexpr int kExactVertexCap = 8;
inline constexpr double kPrefixCoverage = 0.95;

// K probability vectors over the same label space, stored row-major.
class SampleSet {
public:
    SampleSet(LabelSpace space, std::vector<double> rows);
    SampleSet(LabelSpace space, const std::vector<ProbabilityVector>& rows);

    const LabelSpace& space() const { return space_; }
    std::size_t num_samples() const { return data_.size() / space_.size(); }
    std::span<const double> sample(std::size_t k) const {
        return {data_.data() + k * space_.size(), static_cast<std::size_t>(space_.size())};
    }
    const std::vector<double>& data() const { return data_; }
    ProbabilityVector mean() const;

private:
    LabelSpace space_;
    std::vector<double> data_;
};

// Per-class probability intervals [lower_c, upper_c].
class IntervalPrediction {
public:
    IntervalPrediction(LabelSpace space, ProbabilityVector lower, ProbabilityVector upper);

    const LabelSpace& space() const { return space_; }
    const ProbabilityVector& lower() const { return lower_; }
    const ProbabilityVector& upper() const { return upper_; }
    // Tightest intervals with every bound attained by a member of the set.
    IntervalPrediction reachable() const;
    // Normalized interval midpoints.
    ProbabilityVector midpoint() const;

private:
    LabelSpace space_;
    ProbabilityVector lower_, upper_;
};

enum class VertexProvenance { exact, approximate, native };
enum class VertexMode { exact, approximate };

class CredalVertices {
public:
    // Removes duplicates (max-norm within kVertexTolerance), keeping first occurrences.
    CredalVertices(LabelSpace space, std::vector<ProbabilityVector> vertices, VertexProvenance provenance);

    const LabelSpace& space() const { return space_; }
    const std::vector<ProbabilityVector>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    VertexProvenance provenance() const { return provenance_; }
    // True if some stored vertex is within `tol` of p in max-norm.
    bool contains(std::span<const double> p, double tol = kVertexTolerance) const;

private:
    LabelSpace space_;
    std::vector<ProbabilityVector> vertices_;
    VertexProvenance provenance_;
};

// Max-norm tolerant deduplication that keeps the input order of survivors.
std::vector<ProbabilityVector> dedup_vertices(std::vector<ProbabilityVector> vertices, double tol = kVertexTolerance);

// P(A) = min over samples of the sample's probability of A, for every A in
// `family`. The family must hold the full set and every singleton.
LowerProbability lower_prob_from_samples(const SampleSet& s, std::span<const SubsetMask> family);
// Full powerset variant (N <= kMaxDenseClasses).
LowerProbability lower_prob_from_samples(const SampleSet& s);

// Counts the shortest prefix sets reaching kPrefixCoverage across any number
// of probability vectors and turns the most frequent ones into a budgeted
// family.
class BudgetSelector {
public:
    explicit BudgetSelector(LabelSpace space) : space_(std::move(space)) {}
    void add(std::span<const double> p);
    void add(const SampleSet& s);
    std::vector<SubsetMask> select(int budget) const;

private:
    LabelSpace space_;
    std::map<SubsetMask, std::size_t> counts_;
};

std::vector<SubsetMask> select_budget_subsets(const SampleSet& s, int budget);

// Extreme point induced by a permutation: each focal mass goes to the member
// of the focal set that comes first in `order`.
ProbabilityVector permutation_vertex(const MassFunction& m, std::span<const int> order);

CredalVertices vertices_exact(const MassFunction& m, int cap = kExactVertexCap);
// Same vertex list as vertices_exact; permutations are split across OpenMP
// threads. Falls back to the serial path when built without OpenMP.
CredalVertices vertices_exact_parallel(const MassFunction& m, int cap = kExactVertexCap);
// 2N permutations: each class once first and once last, the other classes in
// index order.
CredalVertices vertices_approx(const MassFunction& m);
CredalVertices credal_vertices(const MassFunction& m, VertexMode mode);

// Lower envelope max(sum_A lower, 1 - sum_{not A} upper) of the reachable
// intervals, on `family` (must contain the full set and all singletons).
LowerProbability lower_prob_from_intervals(const IntervalPrediction& ip, std::span<const SubsetMask> family);
LowerProbability lower_prob_from_intervals(const IntervalPrediction& ip);
CredalVertices credal_from_intervals(const IntervalPrediction& ip, VertexMode mode = VertexMode::exact);

IntervalPrediction intervals_from_samples(const SampleSet& s);

double credal_width(const CredalVertices& v, int class_index);

}  // namespace credeval
