#pragma once

#include <span>
#include <utility>
#include <vector>

#include "credeval/label_space.hpp"

namespace credeval {

inline constexpr double kMassTolerance = 1e-9;
// Masses below this are not stored.
inline constexpr double kMassDropThreshold = 1e-12;

struct FocalElement {
    SubsetMask set;
    double mass;
};

// Sparse mass function (basic belief assignment). Focal elements are stored in
// CardinalityOrder; m(empty) = 0, masses are nonnegative and sum to one.
class MassFunction {
public:
    // Validates and normalizes. `sum_tolerance` bounds how far the supplied
    // total may stray from one before normalization; duplicate focal sets and
    // mass on the empty set are rejected.
    MassFunction(LabelSpace space, std::vector<FocalElement> focal, double sum_tolerance = kMassTolerance);

    static MassFunction vacuous(const LabelSpace& space);
    static MassFunction bayesian(const LabelSpace& space, std::span<const double> p);

    const LabelSpace& space() const { return space_; }
    const std::vector<FocalElement>& focal() const { return focal_; }
    // Stored mass of exactly A (zero when A is not focal).
    double mass(const SubsetMask& a) const;
    // True when every focal element is a singleton.
    bool is_bayesian() const;

private:
    LabelSpace space_;
    std::vector<FocalElement> focal_;
};

// Partial mapping A -> lower probability over a subset family. The family
// always contains the full set; the empty set is implicit with value 0.
class LowerProbability {
public:
    LowerProbability(LabelSpace space, std::vector<std::pair<SubsetMask, double>> values);

    // Dense constructor: `values[mask]` for every mask in [0, 2^N).
    static LowerProbability from_dense(const LabelSpace& space, std::vector<double> values);

    const LabelSpace& space() const { return space_; }
    // Entries sorted in CardinalityOrder, empty set excluded.
    const std::vector<std::pair<SubsetMask, double>>& values() const { return values_; }
    bool full_powerset() const;
    // Lower probability of a family member; throws StructuralError otherwise.
    double at(const SubsetMask& a) const;
    std::vector<SubsetMask> family() const;

private:
    LabelSpace space_;
    std::vector<std::pair<SubsetMask, double>> values_;
};

struct MobiusResult {
    MassFunction mass;
    // Sum of the raw alternating sums before clamping and renormalization.
    double raw_total;
    // Sum of the negative raw masses that were clamped to zero.
    double clamped_negative;
};

// Möbius inverse m(A) = sum_{B subset A} (-1)^{|A\B|} P(B), negative values
// clamped and the result renormalized. On budgeted families m(A) is the
// lower probability minus the masses already assigned to listed subsets of A,
// so any residual lands on the full set.
MobiusResult mobius_inverse_detailed(const LowerProbability& lp);
MassFunction mobius_inverse(const LowerProbability& lp);

// Lower probability induced by a mass function, evaluated on `family`.
LowerProbability belief_function(const MassFunction& m, std::span<const SubsetMask> family);
// Full powerset variant (N <= kMaxDenseClasses).
LowerProbability belief_function(const MassFunction& m);

double belief(const MassFunction& m, const SubsetMask& a);
double plausibility(const MassFunction& m, const SubsetMask& a);
// Q(A) = sum over focal supersets of A. A must be nonempty.
double commonality(const MassFunction& m, const SubsetMask& a);
ProbabilityVector pignistic(const MassFunction& m);

// All nonempty subsets of an N-class space, N <= kMaxDenseClasses.
std::vector<SubsetMask> full_family(const LabelSpace& space);

}  // namespace credeval
