#include "credeval/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "credeval/errors.hpp"

namespace credeval {

namespace {

double entropy_nats(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return std::max(h, 0.0);
}

double clamped_total(const IntervalPrediction& ip, double level) {
    double s = 0.0;
    for (std::size_t c = 0; c < ip.lower().size(); ++c) s += std::clamp(level, ip.lower()[c], ip.upper()[c]);
    return s;
}

// Exact: a minimum of a concave function over a polytope sits at a vertex,
// and every vertex of the interval polytope has at most one coordinate strictly
// inside its bounds.
double min_entropy_vertices(const IntervalPrediction& ip) {
    const auto& lo = ip.lower();
    const auto& hi = ip.upper();
    const int n = static_cast<int>(lo.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> p(n);
    const std::uint32_t combos = std::uint32_t{1} << (n - 1);
    for (int free = 0; free < n; ++free) {
        for (std::uint32_t bits = 0; bits < combos; ++bits) {
            double fixed = 0.0;
            int b = 0;
            for (int c = 0; c < n; ++c) {
                if (c == free) continue;
                p[c] = ((bits >> b) & 1U) ? hi[c] : lo[c];
                fixed += p[c];
                ++b;
            }
            const double rest = 1.0 - fixed;
            if (rest < lo[free] - 1e-12 || rest > hi[free] + 1e-12) continue;
            p[free] = std::clamp(rest, 0.0, 1.0);
            best = std::min(best, entropy_nats(p));
        }
    }
    return best;
}

double exchange_room(const std::vector<double>& p, const IntervalPrediction& ip, int i, int j) {
    // Move as much mass as possible from j to i; entropy along the segment is
    // concave so one of the two end points is the better move.
    const double room = std::min(ip.upper()[i] - p[i], p[j] - ip.lower()[j]);
    return std::max(room, 0.0);
}

// Greedy fill from 2N seed orders, then pairwise exchanges until no move
// lowers the entropy.
double min_entropy_descent(const IntervalPrediction& ip) {
    const auto& lo = ip.lower();
    const auto& hi = ip.upper();
    const int n = static_cast<int>(lo.size());
    std::vector<int> by_upper(n);
    std::iota(by_upper.begin(), by_upper.end(), 0);
    std::stable_sort(by_upper.begin(), by_upper.end(), [&](int a, int b) { return hi[a] - lo[a] > hi[b] - lo[b]; });

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> p(n);
    for (int seed = 0; seed < 2 * n; ++seed) {
        const int cls = seed / 2;
        std::vector<int> order;
        order.reserve(n);
        if (seed % 2 == 0) order.push_back(cls);
        for (int c : by_upper)
            if (c != cls) order.push_back(c);
        if (seed % 2 == 1) order.push_back(cls);

        p.assign(lo.begin(), lo.end());
        double remaining = 1.0 - std::accumulate(lo.begin(), lo.end(), 0.0);
        for (int c : order) {
            const double add = std::min(remaining, hi[c] - lo[c]);
            p[c] += add;
            remaining -= add;
        }

        double h = entropy_nats(p);
        for (bool improved = true; improved;) {
            improved = false;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double move = exchange_room(p, ip, i, j);
                    if (move <= 1e-15) continue;
                    p[i] += move;
                    p[j] -= move;
                    const double h2 = entropy_nats(p);
                    if (h2 < h - 1e-15) {
                        h = h2;
                        improved = true;
                    } else {
                        p[i] -= move;
                        p[j] += move;
                    }
                }
            }
        }
        best = std::min(best, h);
    }
    return best;
}

}  // namespace

double ns_dubois(const MassFunction& m, LogBase base) {
    double ns = 0.0;
    for (const auto& f : m.focal()) ns += f.mass * std::log(static_cast<double>(f.set.count()));
    return ns * base.scale();
}

double ns_smets(const MassFunction& m, LogBase base) {
    const auto& space = m.space();
    if (!space.dense()) throw CapacityError("Smets non-specificity enumerates the powerset; N must be <= 16");
    const int n = space.size();
    const std::size_t size = std::size_t{1} << n;
    std::vector<double> q(size, 0.0);
    for (const auto& f : m.focal()) q[f.set.low_bits()] = f.mass;
    // superset sums
    for (int bit = 0; bit < n; ++bit) {
        const std::size_t b = std::size_t{1} << bit;
        for (std::size_t mask = 0; mask < size; ++mask)
            if (!(mask & b)) q[mask] += q[mask | b];
    }
    double ns = 0.0;
    for (std::size_t mask = 1; mask < size; ++mask)
        if (q[mask] > 0.0) ns -= std::log(std::min(q[mask], 1.0));
    return ns * base.scale();
}

double ns_korner(const MassFunction& m) {
    double s = 0.0;
    for (const auto& f : m.focal()) s += f.mass * f.set.count();
    return s;
}

double spec_pal(const MassFunction& m) {
    double s = 0.0;
    for (const auto& f : m.focal()) s += f.mass / f.set.count();
    return s;
}

double shannon_entropy(std::span<const double> p, LogBase base) { return entropy_nats(p) * base.scale(); }

ProbabilityVector max_entropy_distribution(const IntervalPrediction& ip) {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double total = clamped_total(ip, mid);
        if (std::abs(total - 1.0) <= 1e-13) {
            lo = hi = mid;
            break;
        }
        (total < 1.0 ? lo : hi) = mid;
    }
    const double level = 0.5 * (lo + hi);
    ProbabilityVector p(ip.lower().size());
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = std::clamp(level, ip.lower()[c], ip.upper()[c]);
    return p;
}

EntropyBounds entropy_bounds(const IntervalPrediction& ip, LogBase base) {
    const double upper = entropy_nats(max_entropy_distribution(ip));
    const int n = ip.space().size();
    double lower = n <= kExactMinEntropyCap ? min_entropy_vertices(ip) : min_entropy_descent(ip);
    lower = std::min(lower, upper);
    const double s = base.scale();
    return {lower * s, upper * s};
}

double credal_uncertainty(const IntervalPrediction& ip, LogBase base) {
    const auto b = entropy_bounds(ip, base);
    return std::max(b.upper - b.lower, 0.0);
}

double mutual_information(const SampleSet& s, LogBase base) {
    const ProbabilityVector mean = s.mean();
    double avg = 0.0;
    for (std::size_t k = 0; k < s.num_samples(); ++k) avg += entropy_nats(s.sample(k));
    avg /= static_cast<double>(s.num_samples());
    return std::max(entropy_nats(mean) - avg, 0.0) * base.scale();
}

}  // namespace credeval
