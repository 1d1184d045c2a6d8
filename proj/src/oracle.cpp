#include "credeval/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "credeval/errors.hpp"

namespace credeval::oracle {

namespace {

double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Largest distance from a vertex of one list to the nearest vertex of the other.
double one_sided_distance(const CredalVertices& from, const CredalVertices& to) {
    double worst = 0.0;
    for (const auto& v : from.vertices()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& w : to.vertices()) best = std::min(best, max_abs_diff(v, w));
        worst = std::max(worst, best);
    }
    return worst;
}

std::vector<double> random_distribution(std::mt19937_64& rng, int n) {
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& v : p) {
        v = unit(rng) < 0.2 ? 0.0 : expo(rng);  // some exact zeros
        sum += v;
    }
    if (sum == 0.0) {
        p[std::uniform_int_distribution<int>(0, n - 1)(rng)] = 1.0;
        return p;
    }
    for (auto& v : p) v /= sum;
    return p;
}

MassFunction random_mass(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<std::uint64_t> mask_dist(1, (std::uint64_t{1} << n) - 1);
    std::uniform_int_distribution<int> count_dist(1, std::min(8, (1 << n) - 1));
    std::exponential_distribution<double> expo(1.0);
    const int count = count_dist(rng);
    std::vector<std::uint64_t> masks;
    while (static_cast<int>(masks.size()) < count) {
        const auto m = mask_dist(rng);
        if (std::find(masks.begin(), masks.end(), m) == masks.end()) masks.push_back(m);
    }
    std::vector<FocalElement> focal;
    double sum = 0.0;
    for (auto m : masks) {
        focal.push_back({SubsetMask::from_bits(m), expo(rng) + 1e-3});
        sum += focal.back().mass;
    }
    for (auto& f : focal) f.mass /= sum;
    return MassFunction(LabelSpace(n), std::move(focal));
}

IntervalPrediction random_intervals(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto p = random_distribution(rng, n);
    std::vector<double> lo(n), hi(n);
    for (int c = 0; c < n; ++c) {
        // occasionally precise
        const double below = unit(rng) < 0.1 ? 0.0 : 0.3 * unit(rng);
        const double above = unit(rng) < 0.1 ? 0.0 : 0.3 * unit(rng);
        lo[c] = std::max(0.0, p[c] - below);
        hi[c] = std::min(1.0, p[c] + above);
    }
    return IntervalPrediction(LabelSpace(n), std::move(lo), std::move(hi));
}

void note_failure(BatchReport& r, int case_index, const std::string& what, double err) {
    ++r.failures;
    if (r.first_failure.empty()) {
        std::ostringstream os;
        os << "case " << case_index << ": " << what << " (error " << err << ")";
        r.first_failure = os.str();
    }
}

// Grid over [lo, hi] with the given step, both end points, and any extra
// points that fall inside.
std::vector<double> axis(double lo, double hi, double step, const std::vector<double>& extra) {
    std::vector<double> xs;
    if (hi < lo - 1e-12) return xs;
    hi = std::max(hi, lo);  // degenerate range computed with rounding
    for (double x = lo; x < hi; x += step) xs.push_back(x);
    xs.push_back(hi);
    for (double x : extra)
        if (x >= lo && x <= hi) xs.push_back(x);
    return xs;
}

}  // namespace

LowerProbability brute_lower_probability(const SampleSet& s) {
    const int n = s.space().size();
    if (n > kMaxLowerClasses) throw CapacityError("brute_lower_probability supports N <= 12");
    const std::uint64_t size = std::uint64_t{1} << n;
    std::vector<double> values(size, 0.0);
    for (std::uint64_t mask = 1; mask < size; ++mask) {
        double lowest = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < s.num_samples(); ++k) {
            const auto p = s.sample(k);
            double total = 0.0;
            for (int c = 0; c < n; ++c)
                if (mask >> c & 1U) total += p[c];
            lowest = std::min(lowest, total);
        }
        values[mask] = std::clamp(lowest, 0.0, 1.0);
    }
    values[size - 1] = 1.0;
    return LowerProbability::from_dense(s.space(), std::move(values));
}

MassFunction brute_mobius(const LowerProbability& lp) {
    const int n = lp.space().size();
    if (n > kMaxLowerClasses) throw CapacityError("brute_mobius supports N <= 12");
    const std::uint64_t size = std::uint64_t{1} << n;
    std::vector<FocalElement> focal;
    double total = 0.0;
    for (std::uint64_t a = 1; a < size; ++a) {
        double m = 0.0;
        // every B subset of A, including the empty set (value 0)
        for (std::uint64_t b = a;; b = (b - 1) & a) {
            if (b != 0) {
                const int sign = (std::popcount(a) - std::popcount(b)) % 2 == 0 ? 1 : -1;
                m += sign * lp.at(SubsetMask::from_bits(b));
            }
            if (b == 0) break;
        }
        if (m > 0.0) {
            focal.push_back({SubsetMask::from_bits(a), m});
            total += m;
        }
    }
    if (total <= 0.0) throw DegenerateInputError("all Möbius masses are nonpositive");
    for (auto& f : focal) f.mass /= total;
    return MassFunction(lp.space(), std::move(focal), 1.0);
}

CredalVertices brute_vertices(const MassFunction& m) {
    const int n = m.space().size();
    if (n > kMaxVertexClasses) throw CapacityError("brute_vertices supports N <= 6");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<ProbabilityVector> out;
    do {
        ProbabilityVector p(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const int cls = order[i];
            for (const auto& f : m.focal()) {
                if (!f.set.contains(cls)) continue;
                bool claimed_earlier = false;
                for (int j = 0; j < i; ++j)
                    if (f.set.contains(order[j])) claimed_earlier = true;
                if (!claimed_earlier) p[cls] += f.mass;
            }
        }
        out.push_back(std::move(p));
    } while (std::next_permutation(order.begin(), order.end()));
    return CredalVertices(m.space(), std::move(out), VertexProvenance::exact);
}

EntropyBounds brute_entropy_bounds(const IntervalPrediction& ip, double step) {
    const int n = ip.space().size();
    if (n > kMaxEntropyClasses) throw CapacityError("brute_entropy_bounds supports N <= 3");
    if (!(step >= 1e-4 && step <= 1e-2)) throw ContractViolation("grid step must lie in [1e-4, 1e-2]");
    const auto& l = ip.lower();
    const auto& u = ip.upper();

    double lo_h = std::numeric_limits<double>::infinity();
    double hi_h = -lo_h;
    auto visit = [&](const std::vector<double>& p) {
        const double h = entropy(p);
        lo_h = std::min(lo_h, h);
        hi_h = std::max(hi_h, h);
    };

    if (n == 2) {
        const double a = std::max(l[0], 1.0 - u[1]);
        const double b = std::min(u[0], 1.0 - l[1]);
        for (double x : axis(a, b, step, {0.5})) visit({x, 1.0 - x});
    } else {
        std::vector<double> breaks;
        for (int c = 0; c < 3; ++c) {
            breaks.push_back(l[c]);
            breaks.push_back(u[c]);
        }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                if (a == b) continue;
                for (double x : {l[a], u[a]})
                    for (double y : {l[b], u[b]}) breaks.push_back(1.0 - x - y);
            }
        breaks.push_back(1.0 / 3.0);
        const double a0 = std::max(l[0], 1.0 - u[1] - u[2]);
        const double b0 = std::min(u[0], 1.0 - l[1] - l[2]);
        for (double x : axis(a0, b0, step, breaks)) {
            const double a1 = std::max(l[1], 1.0 - x - u[2]);
            const double b1 = std::min(u[1], 1.0 - x - l[2]);
            std::vector<double> extra = breaks;
            extra.push_back(0.5 * (1.0 - x));
            for (double y : axis(a1, b1, step, extra)) visit({x, y, std::max(0.0, 1.0 - x - y)});
        }
    }
    if (!std::isfinite(lo_h)) throw InfeasibleInputError("interval constraints admit no distribution");
    return {lo_h, hi_h};
}

bool SelfTestReport::passed() const {
    for (const auto& b : batches)
        if (b.failures != 0) return false;
    return !batches.empty();
}

SelfTestReport self_test(int max_classes, std::uint64_t seed) {
    if (max_classes < 3 || max_classes > kMaxVertexClasses)
        throw ContractViolation("oracle self-test needs max_classes in [3, 6]");
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n_dist(2, max_classes);
    std::uniform_int_distribution<int> k_dist(1, 20);
    constexpr double vertex_tol = 1e-9;
    constexpr double entropy_tol = 1e-4;

    SelfTestReport report;

    {
        BatchReport r{"sample pipeline vs brute composition"};
        for (int i = 0; i < 500; ++i, ++r.cases) {
            const int n = n_dist(rng);
            const int k = k_dist(rng);
            std::vector<ProbabilityVector> rows;
            for (int j = 0; j < k; ++j) rows.push_back(random_distribution(rng, n));
            const SampleSet s(LabelSpace(n), rows);
            try {
                const auto fast_lp = lower_prob_from_samples(s);
                const auto slow_lp = brute_lower_probability(s);
                double err = 0.0;
                for (const auto& [a, v] : slow_lp.values()) err = std::max(err, std::abs(v - fast_lp.at(a)));
                const auto fast_v = vertices_exact(mobius_inverse(fast_lp));
                const auto slow_v = brute_vertices(brute_mobius(slow_lp));
                err = std::max({err, one_sided_distance(fast_v, slow_v), one_sided_distance(slow_v, fast_v)});
                r.max_error = std::max(r.max_error, err);
                if (err > vertex_tol) note_failure(r, i, "vertex sets differ", err);
            } catch (const std::exception& e) {
                note_failure(r, i, e.what(), 0.0);
            }
        }
        report.batches.push_back(r);
    }

    {
        BatchReport r{"approximate vertices inside brute vertex set"};
        for (int i = 0; i < 200; ++i, ++r.cases) {
            const int n = n_dist(rng);
            try {
                const auto m = random_mass(rng, n);
                const double err = one_sided_distance(vertices_approx(m), brute_vertices(m));
                r.max_error = std::max(r.max_error, err);
                if (err > vertex_tol) note_failure(r, i, "approximate vertex not a brute vertex", err);
            } catch (const std::exception& e) {
                note_failure(r, i, e.what(), 0.0);
            }
        }
        report.batches.push_back(r);
    }

    {
        BatchReport r{"entropy bounds vs grid search"};
        std::uniform_int_distribution<int> small_n(2, std::min(max_classes, kMaxEntropyClasses));
        for (int i = 0; i < 100; ++i, ++r.cases) {
            const int n = small_n(rng);
            try {
                const auto ip = random_intervals(rng, n);
                const auto fast = entropy_bounds(ip);
                const auto slow = brute_entropy_bounds(ip, 1e-3);
                const double err = std::max(std::abs(fast.lower - slow.lower), std::abs(fast.upper - slow.upper));
                r.max_error = std::max(r.max_error, err);
                if (err > entropy_tol) note_failure(r, i, "entropy bounds differ", err);
            } catch (const std::exception& e) {
                note_failure(r, i, e.what(), 0.0);
            }
        }
        report.batches.push_back(r);
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace credeval::oracle
