#include "credeval/setfn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "credeval/errors.hpp"

namespace credeval {

namespace {

void require_in_space(const LabelSpace& space, const SubsetMask& a, const char* what) {
    if (!space.contains(a))
        throw ContractViolation(std::string(what) + " " + a.to_string() + " lies outside the " +
                                std::to_string(space.size()) + "-class label space");
}

void require_dense(const LabelSpace& space) {
    if (!space.dense())
        throw CapacityError("full powerset requested for " + std::to_string(space.size()) +
                            " classes; the cap is " + std::to_string(kMaxDenseClasses));
}

}  // namespace

MassFunction::MassFunction(LabelSpace space, std::vector<FocalElement> focal, double sum_tolerance)
    : space_(std::move(space)) {
    std::sort(focal.begin(), focal.end(),
              [](const FocalElement& a, const FocalElement& b) { return CardinalityOrder{}(a.set, b.set); });
    double total = 0.0;
    for (std::size_t i = 0; i < focal.size(); ++i) {
        const auto& f = focal[i];
        require_in_space(space_, f.set, "focal set");
        if (i > 0 && focal[i - 1].set == f.set)
            throw ContractViolation("duplicate focal set " + f.set.to_string());
        if (!std::isfinite(f.mass) || f.mass < -sum_tolerance)
            throw ContractViolation("negative or non-finite mass on " + f.set.to_string());
        if (f.set.empty()) {
            if (f.mass > sum_tolerance) throw ContractViolation("mass assigned to the empty set");
            continue;
        }
        total += std::max(f.mass, 0.0);
    }
    if (total <= 0.0) throw DegenerateInputError("mass function has zero total mass");
    if (std::abs(total - 1.0) > sum_tolerance)
        throw ContractViolation("masses sum to " + std::to_string(total) + ", expected 1");

    focal_.reserve(focal.size());
    for (const auto& f : focal) {
        if (f.set.empty() || f.mass < kMassDropThreshold) continue;
        focal_.push_back({f.set, f.mass / total});
    }
}

MassFunction MassFunction::vacuous(const LabelSpace& space) {
    return MassFunction(space, {{space.full_set(), 1.0}});
}

MassFunction MassFunction::bayesian(const LabelSpace& space, std::span<const double> p) {
    if (static_cast<int>(p.size()) != space.size())
        throw ContractViolation("probability vector length does not match the label space");
    std::vector<FocalElement> focal;
    for (int c = 0; c < space.size(); ++c) focal.push_back({SubsetMask::singleton(c), p[c]});
    return MassFunction(space, std::move(focal), 1e-6);
}

double MassFunction::mass(const SubsetMask& a) const {
    auto it = std::lower_bound(focal_.begin(), focal_.end(), a,
                               [](const FocalElement& f, const SubsetMask& s) { return CardinalityOrder{}(f.set, s); });
    if (it != focal_.end() && it->set == a) return it->mass;
    return 0.0;
}

bool MassFunction::is_bayesian() const {
    return std::all_of(focal_.begin(), focal_.end(), [](const FocalElement& f) { return f.set.count() == 1; });
}

LowerProbability::LowerProbability(LabelSpace space, std::vector<std::pair<SubsetMask, double>> values)
    : space_(std::move(space)) {
    std::sort(values.begin(), values.end(),
              [](const auto& a, const auto& b) { return CardinalityOrder{}(a.first, b.first); });
    values_.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto [set, v] = values[i];
        require_in_space(space_, set, "subset");
        if (i > 0 && values[i - 1].first == set)
            throw ContractViolation("duplicate subset " + set.to_string() + " in lower probability");
        if (!std::isfinite(v) || v < -kMassTolerance || v > 1.0 + kMassTolerance)
            throw ContractViolation("lower probability of " + set.to_string() + " outside [0,1]");
        v = std::clamp(v, 0.0, 1.0);
        if (set.empty()) {
            if (v > kMassTolerance) throw ContractViolation("lower probability of the empty set must be 0");
            continue;
        }
        values_.emplace_back(set, v);
    }
    if (values_.empty() || values_.back().first != space_.full_set())
        throw StructuralError("lower probability has no value for the full label set");
    if (std::abs(values_.back().second - 1.0) > kMassTolerance)
        throw ContractViolation("lower probability of the full label set must be 1");
    values_.back().second = 1.0;
}

LowerProbability LowerProbability::from_dense(const LabelSpace& space, std::vector<double> values) {
    require_dense(space);
    const std::size_t n = std::size_t{1} << space.size();
    if (values.size() != n) throw ContractViolation("dense lower probability needs 2^N entries");
    std::vector<std::pair<SubsetMask, double>> entries;
    entries.reserve(n - 1);
    for (std::size_t mask = 1; mask < n; ++mask) entries.emplace_back(SubsetMask::from_bits(mask), values[mask]);
    return LowerProbability(space, std::move(entries));
}

bool LowerProbability::full_powerset() const {
    return space_.dense() && values_.size() == (std::size_t{1} << space_.size()) - 1;
}

double LowerProbability::at(const SubsetMask& a) const {
    if (a.empty()) return 0.0;
    auto it = std::lower_bound(values_.begin(), values_.end(), a,
                               [](const auto& e, const SubsetMask& s) { return CardinalityOrder{}(e.first, s); });
    if (it == values_.end() || it->first != a)
        throw StructuralError("subset " + a.to_string() + " has no lower probability");
    return it->second;
}

std::vector<SubsetMask> LowerProbability::family() const {
    std::vector<SubsetMask> out;
    out.reserve(values_.size());
    for (const auto& [set, v] : values_) out.push_back(set);
    return out;
}

MobiusResult mobius_inverse_detailed(const LowerProbability& lp) {
    const auto& space = lp.space();
    std::vector<FocalElement> raw;

    if (lp.full_powerset()) {
        const int n = space.size();
        const std::size_t size = std::size_t{1} << n;
        std::vector<double> f(size, 0.0);
        for (const auto& [set, v] : lp.values()) f[set.low_bits()] = v;
        // In-place subset-difference transform; each pass removes one element.
        for (int bit = 0; bit < n; ++bit) {
            const std::size_t b = std::size_t{1} << bit;
            for (std::size_t mask = 0; mask < size; ++mask)
                if (mask & b) f[mask] -= f[mask ^ b];
        }
        raw.reserve(size - 1);
        for (const auto& [set, v] : lp.values()) raw.push_back({set, f[set.low_bits()]});
    } else {
        const auto& values = lp.values();
        raw.reserve(values.size());
        for (const auto& [set, v] : values) {
            double m = v;
            for (const auto& prev : raw)
                if (prev.set != set && prev.set.is_subset_of(set)) m -= prev.mass;
            raw.push_back({set, m});
        }
    }

    double raw_total = 0.0, negative = 0.0, kept = 0.0;
    std::vector<FocalElement> focal;
    focal.reserve(raw.size());
    for (const auto& f : raw) {
        raw_total += f.mass;
        if (f.mass < 0.0) {
            negative += f.mass;
            continue;
        }
        if (f.mass < kMassDropThreshold) continue;
        kept += f.mass;
        focal.push_back(f);
    }
    if (kept <= 0.0) throw DegenerateInputError("all masses are zero after clamping negative values");
    for (auto& f : focal) f.mass /= kept;
    return {MassFunction(space, std::move(focal)), raw_total, negative};
}

MassFunction mobius_inverse(const LowerProbability& lp) { return mobius_inverse_detailed(lp).mass; }

double belief(const MassFunction& m, const SubsetMask& a) {
    double s = 0.0;
    for (const auto& f : m.focal())
        if (f.set.is_subset_of(a)) s += f.mass;
    return s;
}

double plausibility(const MassFunction& m, const SubsetMask& a) {
    double s = 0.0;
    for (const auto& f : m.focal())
        if (f.set.intersects(a)) s += f.mass;
    return s;
}

double commonality(const MassFunction& m, const SubsetMask& a) {
    if (a.empty()) throw ContractViolation("commonality is undefined for the empty set");
    double s = 0.0;
    for (const auto& f : m.focal())
        if (a.is_subset_of(f.set)) s += f.mass;
    return s;
}

ProbabilityVector pignistic(const MassFunction& m) {
    ProbabilityVector p(m.space().size(), 0.0);
    for (const auto& f : m.focal()) {
        const auto members = f.set.members();
        const double share = f.mass / static_cast<double>(members.size());
        for (int c : members) p[c] += share;
    }
    return p;
}

LowerProbability belief_function(const MassFunction& m, std::span<const SubsetMask> family) {
    std::vector<std::pair<SubsetMask, double>> values;
    values.reserve(family.size() + 1);
    bool has_full = false;
    for (const auto& a : family) {
        if (a == m.space().full_set()) has_full = true;
        values.emplace_back(a, std::min(belief(m, a), 1.0));
    }
    if (!has_full) values.emplace_back(m.space().full_set(), 1.0);
    return LowerProbability(m.space(), std::move(values));
}

LowerProbability belief_function(const MassFunction& m) {
    const auto& space = m.space();
    require_dense(space);
    const int n = space.size();
    const std::size_t size = std::size_t{1} << n;
    std::vector<double> g(size, 0.0);
    for (const auto& f : m.focal()) g[f.set.low_bits()] = f.mass;
    for (int bit = 0; bit < n; ++bit) {
        const std::size_t b = std::size_t{1} << bit;
        for (std::size_t mask = 0; mask < size; ++mask)
            if (mask & b) g[mask] += g[mask ^ b];
    }
    for (auto& v : g) v = std::min(v, 1.0);
    g[size - 1] = 1.0;
    return LowerProbability::from_dense(space, std::move(g));
}

std::vector<SubsetMask> full_family(const LabelSpace& space) {
    require_dense(space);
    const std::size_t size = std::size_t{1} << space.size();
    std::vector<SubsetMask> out;
    out.reserve(size - 1);
    for (std::size_t mask = 1; mask < size; ++mask) out.push_back(SubsetMask::from_bits(mask));
    std::sort(out.begin(), out.end(), CardinalityOrder{});
    return out;
}

}  // namespace credeval
