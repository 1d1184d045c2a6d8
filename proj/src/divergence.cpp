#include "credeval/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "credeval/errors.hpp"

namespace credeval {

namespace {

void require_same_length(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ContractViolation("divergence arguments differ in length");
}

double kl_nats(std::span<const double> p, std::span<const double> q, double eps) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        d += p[i] * std::log(p[i] / std::max(q[i], eps));
    }
    return std::max(d, 0.0);
}

}  // namespace

ProbabilityVector GroundTruth::one_hot(const LabelSpace& space) const {
    if (true_class < 0 || true_class >= space.size()) throw ContractViolation("true class out of range");
    ProbabilityVector y(space.size(), 0.0);
    y[true_class] = 1.0;
    return y;
}

double LogBase::scale() const {
    if (!(base > 1.0)) throw ContractViolation("logarithm base must exceed 1");
    return 1.0 / std::log(base);
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double eps, LogBase base) {
    require_same_length(p, q);
    return kl_nats(p, q, eps) * base.scale();
}

double js_divergence(std::span<const double> p, std::span<const double> q, double eps, LogBase base) {
    require_same_length(p, q);
    std::vector<double> mid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
    const double js = 0.5 * kl_nats(p, mid, eps) + 0.5 * kl_nats(q, mid, eps);
    return std::min(js, std::log(2.0)) * base.scale();
}

double divergence(DivergenceKind kind, std::span<const double> p, std::span<const double> q, double eps,
                  LogBase base) {
    return kind == DivergenceKind::kl ? kl_divergence(p, q, eps, base) : js_divergence(p, q, eps, base);
}

NearestVertex min_divergence_to_vertices(const GroundTruth& y, const CredalVertices& v, DivergenceKind kind,
                                         double eps, LogBase base) {
    const ProbabilityVector target = y.one_hot(v.space());
    NearestVertex best{0.0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = divergence(kind, target, v.vertices()[i], eps, base);
        if (i == 0 || d < best.distance) best = {d, i};
    }
    return best;
}

double divergence_scale_factor(double max_kl, double max_js) {
    if (!(max_js > 0.0)) throw ContractViolation("maximum JS divergence must be positive");
    return max_kl / max_js;
}

double rescale_lambda_for_js(double lambda, double scale_factor) {
    if (!(scale_factor > 0.0)) throw ContractViolation("scale factor must be positive");
    return lambda / scale_factor;
}

}  // namespace credeval
