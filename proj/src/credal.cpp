#include "credeval/credal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "credeval/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace credeval {

namespace {

void validate_probability_row(std::span<const double> row, std::size_t k) {
    double sum = 0.0;
    for (double v : row) {
        if (!std::isfinite(v) || v < 0.0)
            throw ContractViolation("sample " + std::to_string(k) + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSampleSumTolerance)
        throw ContractViolation("sample " + std::to_string(k) + " sums to " + std::to_string(sum));
}

void require_family_basics(const LabelSpace& space, std::span<const SubsetMask> family) {
    if (family.empty()) throw ContractViolation("subset family is empty");
    const SubsetMask full = space.full_set();
    bool has_full = false;
    std::vector<bool> singleton(space.size(), false);
    for (const auto& a : family) {
        if (a == full) has_full = true;
        if (a.count() == 1) singleton[a.members().front()] = true;
    }
    if (!has_full) throw ContractViolation("subset family must contain the full label set");
    if (std::find(singleton.begin(), singleton.end(), false) != singleton.end())
        throw ContractViolation("subset family must contain every singleton");
}

// Cumulative probability of subsets, indexed by mask: sums[mask] = p(mask).
void subset_sums(std::span<const double> p, std::vector<double>& sums) {
    const std::size_t size = sums.size();
    sums[0] = 0.0;
    for (std::size_t mask = 1; mask < size; ++mask) {
        const int low = std::countr_zero(mask);
        sums[mask] = sums[mask & (mask - 1)] + p[low];
    }
}

struct FocalMembers {
    std::vector<std::vector<int>> members;
    std::vector<double> mass;
};

FocalMembers explode(const MassFunction& m) {
    FocalMembers out;
    out.members.reserve(m.focal().size());
    out.mass.reserve(m.focal().size());
    for (const auto& f : m.focal()) {
        out.members.push_back(f.set.members());
        out.mass.push_back(f.mass);
    }
    return out;
}

void permutation_vertex_into(const FocalMembers& fm, std::span<const int> rank, ProbabilityVector& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < fm.members.size(); ++i) {
        int best = fm.members[i].front();
        for (int c : fm.members[i])
            if (rank[c] < rank[best]) best = c;
        out[best] += fm.mass[i];
    }
}

void require_exact_cap(const MassFunction& m, int cap) {
    if (m.space().size() > cap)
        throw CapacityError("exact vertex enumeration is capped at " + std::to_string(cap) + " classes (got " +
                            std::to_string(m.space().size()) + "); use vertices_approx");
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

// Lexicographic permutation with the given rank (Lehmer code).
void unrank_permutation(std::uint64_t index, int n, std::vector<int>& perm) {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    perm.resize(n);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t f = factorial(n - 1 - i);
        const auto pick = static_cast<std::size_t>(index / f);
        index %= f;
        perm[i] = pool[pick];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
}

}  // namespace

SampleSet::SampleSet(LabelSpace space, std::vector<double> rows) : space_(std::move(space)), data_(std::move(rows)) {
    const auto n = static_cast<std::size_t>(space_.size());
    if (data_.empty() || data_.size() % n != 0)
        throw ContractViolation("sample set must hold a positive number of length-N vectors");
    for (std::size_t k = 0; k < num_samples(); ++k) validate_probability_row(sample(k), k);
}

SampleSet::SampleSet(LabelSpace space, const std::vector<ProbabilityVector>& rows)
    : SampleSet(space, [&] {
          std::vector<double> flat;
          for (const auto& r : rows) {
              if (static_cast<int>(r.size()) != space.size())
                  throw ContractViolation("sample length does not match the label space");
              flat.insert(flat.end(), r.begin(), r.end());
          }
          return flat;
      }()) {}

ProbabilityVector SampleSet::mean() const {
    ProbabilityVector m(space_.size(), 0.0);
    const std::size_t k = num_samples();
    for (std::size_t i = 0; i < k; ++i) {
        auto row = sample(i);
        for (std::size_t c = 0; c < row.size(); ++c) m[c] += row[c];
    }
    for (auto& v : m) v /= static_cast<double>(k);
    return m;
}

IntervalPrediction::IntervalPrediction(LabelSpace space, ProbabilityVector lower, ProbabilityVector upper)
    : space_(std::move(space)), lower_(std::move(lower)), upper_(std::move(upper)) {
    const auto n = static_cast<std::size_t>(space_.size());
    if (lower_.size() != n || upper_.size() != n)
        throw ContractViolation("interval bounds must have one entry per class");
    double sl = 0.0, su = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (!(lower_[c] >= 0.0) || !(upper_[c] <= 1.0) || lower_[c] > upper_[c])
            throw ContractViolation("class " + std::to_string(c) + " needs 0 <= lower <= upper <= 1");
        sl += lower_[c];
        su += upper_[c];
    }
    if (sl > 1.0 + kSampleSumTolerance || su < 1.0 - kSampleSumTolerance)
        throw InfeasibleInputError("intervals describe an empty credal set (sum lower " + std::to_string(sl) +
                                   ", sum upper " + std::to_string(su) + ")");
}

IntervalPrediction IntervalPrediction::reachable() const {
    const double sl = std::accumulate(lower_.begin(), lower_.end(), 0.0);
    const double su = std::accumulate(upper_.begin(), upper_.end(), 0.0);
    ProbabilityVector lo(lower_.size()), hi(upper_.size());
    for (std::size_t c = 0; c < lower_.size(); ++c) {
        lo[c] = std::clamp(std::max(lower_[c], 1.0 - (su - upper_[c])), 0.0, 1.0);
        hi[c] = std::clamp(std::min(upper_[c], 1.0 - (sl - lower_[c])), lo[c], 1.0);
    }
    return IntervalPrediction(space_, std::move(lo), std::move(hi));
}

ProbabilityVector IntervalPrediction::midpoint() const {
    ProbabilityVector mid(lower_.size());
    double total = 0.0;
    for (std::size_t c = 0; c < mid.size(); ++c) {
        mid[c] = 0.5 * (lower_[c] + upper_[c]);
        total += mid[c];
    }
    for (auto& v : mid) v /= total;
    return mid;
}

std::vector<ProbabilityVector> dedup_vertices(std::vector<ProbabilityVector> vertices, double tol) {
    if (vertices.empty()) return vertices;
    // Index survivors by a linear functional; near-equal vectors have keys
    // within tol * sum(weights) of each other.
    const std::size_t n = vertices.front().size();
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) weights[i] = 1.0 + std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
    const double window = tol * std::accumulate(weights.begin(), weights.end(), 0.0);

    std::multimap<double, std::size_t> index;
    std::vector<ProbabilityVector> kept;
    for (auto& v : vertices) {
        const double key = std::inner_product(v.begin(), v.end(), weights.begin(), 0.0);
        bool duplicate = false;
        for (auto it = index.lower_bound(key - window); it != index.end() && it->first <= key + window; ++it) {
            const auto& k = kept[it->second];
            double dist = 0.0;
            for (std::size_t i = 0; i < n; ++i) dist = std::max(dist, std::abs(k[i] - v[i]));
            if (dist <= tol) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        index.emplace(key, kept.size());
        kept.push_back(std::move(v));
    }
    return kept;
}

CredalVertices::CredalVertices(LabelSpace space, std::vector<ProbabilityVector> vertices, VertexProvenance provenance)
    : space_(std::move(space)), provenance_(provenance) {
    if (vertices.empty()) throw ContractViolation("credal set needs at least one vertex");
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        if (static_cast<int>(vertices[k].size()) != space_.size())
            throw ContractViolation("vertex length does not match the label space");
        validate_probability_row(vertices[k], k);
    }
    vertices_ = dedup_vertices(std::move(vertices));
}

bool CredalVertices::contains(std::span<const double> p, double tol) const {
    return std::any_of(vertices_.begin(), vertices_.end(), [&](const ProbabilityVector& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (std::abs(v[i] - p[i]) > tol) return false;
        return true;
    });
}

LowerProbability lower_prob_from_samples(const SampleSet& s, std::span<const SubsetMask> family) {
    const auto& space = s.space();
    require_family_basics(space, family);
    const std::size_t k = s.num_samples();

    const bool dense = space.dense() && family.size() == (std::size_t{1} << space.size()) - 1;
    std::vector<std::pair<SubsetMask, double>> values;
    values.reserve(family.size());
    if (dense) {
        const std::size_t size = std::size_t{1} << space.size();
        std::vector<double> lower(size, std::numeric_limits<double>::infinity());
        std::vector<double> sums(size);
        for (std::size_t i = 0; i < k; ++i) {
            subset_sums(s.sample(i), sums);
            for (std::size_t mask = 1; mask < size; ++mask) lower[mask] = std::min(lower[mask], sums[mask]);
        }
        lower[0] = 0.0;
        lower[size - 1] = 1.0;
        return LowerProbability::from_dense(space, std::move(lower));
    }

    const SubsetMask full = space.full_set();
    for (const auto& a : family) {
        if (a == full) {
            values.emplace_back(a, 1.0);
            continue;
        }
        const auto members = a.members();
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            auto row = s.sample(i);
            double p = 0.0;
            for (int c : members) p += row[c];
            lo = std::min(lo, p);
        }
        values.emplace_back(a, std::min(lo, 1.0));
    }
    return LowerProbability(space, std::move(values));
}

LowerProbability lower_prob_from_samples(const SampleSet& s) {
    const auto family = full_family(s.space());
    return lower_prob_from_samples(s, family);
}

void BudgetSelector::add(std::span<const double> p) {
    const int n = space_.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] > p[b]; });
    SubsetMask prefix;
    double cumulative = 0.0;
    for (int c : order) {
        prefix.set(c);
        cumulative += p[c];
        if (cumulative >= kPrefixCoverage - 1e-12) break;
    }
    ++counts_[prefix];
}

void BudgetSelector::add(const SampleSet& s) {
    for (std::size_t k = 0; k < s.num_samples(); ++k) add(s.sample(k));
}

std::vector<SubsetMask> BudgetSelector::select(int budget) const {
    const int n = space_.size();
    if (budget < n + 1)
        throw ContractViolation("subset budget " + std::to_string(budget) + " is below N+1 = " + std::to_string(n + 1));
    const SubsetMask full = space_.full_set();
    std::vector<std::pair<SubsetMask, std::size_t>> extra;
    for (const auto& [set, count] : counts_)
        if (set.count() > 1 && set != full) extra.emplace_back(set, count);
    // counts_ iterates in ascending mask order, so stable sorting keeps the
    // smaller mask first among equal counts.
    std::stable_sort(extra.begin(), extra.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    std::vector<SubsetMask> family;
    for (int c = 0; c < n; ++c) family.push_back(SubsetMask::singleton(c));
    family.push_back(full);
    const auto room = static_cast<std::size_t>(budget - n - 1);
    for (std::size_t i = 0; i < extra.size() && i < room; ++i) family.push_back(extra[i].first);
    std::sort(family.begin(), family.end(), CardinalityOrder{});
    return family;
}

std::vector<SubsetMask> select_budget_subsets(const SampleSet& s, int budget) {
    BudgetSelector selector(s.space());
    selector.add(s);
    return selector.select(budget);
}

ProbabilityVector permutation_vertex(const MassFunction& m, std::span<const int> order) {
    const int n = m.space().size();
    if (static_cast<int>(order.size()) != n) throw ContractViolation("permutation length does not match the label space");
    std::vector<int> rank(n, -1);
    for (int i = 0; i < n; ++i) {
        if (order[i] < 0 || order[i] >= n || rank[order[i]] != -1)
            throw ContractViolation("order is not a permutation of the classes");
        rank[order[i]] = i;
    }
    ProbabilityVector p(n);
    permutation_vertex_into(explode(m), rank, p);
    return p;
}

CredalVertices vertices_exact(const MassFunction& m, int cap) {
    require_exact_cap(m, cap);
    const int n = m.space().size();
    const FocalMembers fm = explode(m);
    std::vector<int> perm(n), rank(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<ProbabilityVector> out;
    out.reserve(factorial(n));
    ProbabilityVector p(n);
    do {
        for (int i = 0; i < n; ++i) rank[perm[i]] = i;
        permutation_vertex_into(fm, rank, p);
        out.push_back(p);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return CredalVertices(m.space(), std::move(out), VertexProvenance::exact);
}

CredalVertices vertices_exact_parallel(const MassFunction& m, int cap) {
    require_exact_cap(m, cap);
    const int n = m.space().size();
    const FocalMembers fm = explode(m);
    const auto total = static_cast<std::int64_t>(factorial(n));
    std::vector<ProbabilityVector> out(static_cast<std::size_t>(total), ProbabilityVector(n));

#pragma omp parallel
    {
        std::vector<int> perm, rank(n);
        std::int64_t begin = 0, end = total;
#ifdef _OPENMP
        const std::int64_t threads = omp_get_num_threads();
        const std::int64_t tid = omp_get_thread_num();
        begin = total * tid / threads;
        end = total * (tid + 1) / threads;
#endif
        if (begin < end) {
            unrank_permutation(static_cast<std::uint64_t>(begin), n, perm);
            for (std::int64_t idx = begin; idx < end; ++idx) {
                for (int i = 0; i < n; ++i) rank[perm[i]] = i;
                permutation_vertex_into(fm, rank, out[static_cast<std::size_t>(idx)]);
                std::next_permutation(perm.begin(), perm.end());
            }
        }
    }
    return CredalVertices(m.space(), std::move(out), VertexProvenance::exact);
}

CredalVertices vertices_approx(const MassFunction& m) {
    const int n = m.space().size();
    const FocalMembers fm = explode(m);
    std::vector<int> rank(n);
    std::vector<ProbabilityVector> out;
    out.reserve(2 * static_cast<std::size_t>(n));
    ProbabilityVector p(n);
    for (int c = 0; c < n; ++c) {
        // c first, others in index order
        for (int j = 0; j < n; ++j) rank[j] = j < c ? j + 1 : j;
        rank[c] = 0;
        permutation_vertex_into(fm, rank, p);
        out.push_back(p);
        // c last
        for (int j = 0; j < n; ++j) rank[j] = j < c ? j : j - 1;
        rank[c] = n - 1;
        permutation_vertex_into(fm, rank, p);
        out.push_back(p);
    }
    return CredalVertices(m.space(), std::move(out), VertexProvenance::approximate);
}

CredalVertices credal_vertices(const MassFunction& m, VertexMode mode) {
    return mode == VertexMode::exact ? vertices_exact(m) : vertices_approx(m);
}

LowerProbability lower_prob_from_intervals(const IntervalPrediction& ip, std::span<const SubsetMask> family) {
    const auto& space = ip.space();
    require_family_basics(space, family);
    const IntervalPrediction r = ip.reachable();
    const double su = std::accumulate(r.upper().begin(), r.upper().end(), 0.0);
    const SubsetMask full = space.full_set();
    std::vector<std::pair<SubsetMask, double>> values;
    values.reserve(family.size());
    for (const auto& a : family) {
        if (a == full) {
            values.emplace_back(a, 1.0);
            continue;
        }
        double lo = 0.0, up_in = 0.0;
        for (int c : a.members()) {
            lo += r.lower()[c];
            up_in += r.upper()[c];
        }
        values.emplace_back(a, std::clamp(std::max(lo, 1.0 - (su - up_in)), 0.0, 1.0));
    }
    return LowerProbability(space, std::move(values));
}

LowerProbability lower_prob_from_intervals(const IntervalPrediction& ip) {
    const auto& space = ip.space();
    if (!space.dense()) throw CapacityError("interval envelope over the full powerset needs N <= 16");
    const IntervalPrediction r = ip.reachable();
    const std::size_t size = std::size_t{1} << space.size();
    std::vector<double> sl(size), su(size), lower(size);
    subset_sums(r.lower(), sl);
    subset_sums(r.upper(), su);
    const double total_upper = su[size - 1];
    for (std::size_t mask = 1; mask < size; ++mask)
        lower[mask] = std::clamp(std::max(sl[mask], 1.0 - (total_upper - su[mask])), 0.0, 1.0);
    lower[0] = 0.0;
    lower[size - 1] = 1.0;
    return LowerProbability::from_dense(space, std::move(lower));
}

CredalVertices credal_from_intervals(const IntervalPrediction& ip, VertexMode mode) {
    const MassFunction m = mobius_inverse(lower_prob_from_intervals(ip));
    if (mode == VertexMode::exact && m.space().size() <= kExactVertexCap) return vertices_exact(m);
    return vertices_approx(m);
}

IntervalPrediction intervals_from_samples(const SampleSet& s) {
    const int n = s.space().size();
    ProbabilityVector lo(n, std::numeric_limits<double>::infinity()), hi(n, 0.0);
    for (std::size_t k = 0; k < s.num_samples(); ++k) {
        auto row = s.sample(k);
        for (int c = 0; c < n; ++c) {
            lo[c] = std::min(lo[c], row[c]);
            hi[c] = std::max(hi[c], row[c]);
        }
    }
    // Rows may sum to 1 within kSampleSumTolerance; keep the bounds feasible.
    for (int c = 0; c < n; ++c) hi[c] = std::min(hi[c], 1.0);
    return IntervalPrediction(s.space(), std::move(lo), std::move(hi));
}

double credal_width(const CredalVertices& v, int class_index) {
    if (class_index < 0 || class_index >= v.space().size()) throw ContractViolation("class index out of range");
    double lo = 1.0, hi = 0.0;
    for (const auto& p : v.vertices()) {
        lo = std::min(lo, p[class_index]);
        hi = std::max(hi, p[class_index]);
    }
    return std::clamp(hi - lo, 0.0, 1.0);
}

}  // namespace credeval
