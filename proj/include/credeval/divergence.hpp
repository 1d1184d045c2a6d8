#pragma once

#include <cstddef>
#include <span>

#include "credeval/credal.hpp"
#include "credeval/label_space.hpp"

namespace credeval {

inline constexpr double kDivergenceEpsilon = 1e-12;

enum class DivergenceKind { kl, js };

// One-hot ground truth for a single instance.
struct GroundTruth {
    int true_class;

    ProbabilityVector one_hot(const LabelSpace& space) const;
};

// Logarithm base shared by divergence and uncertainty measures. Values are
// computed in nats and divided by ln(base).
struct LogBase {
    double base = 2.718281828459045;

    double scale() const;  // 1 / ln(base)
};

// sum_i p_i ln(p_i / max(q_i, eps)) with 0 ln 0 = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q, double eps = kDivergenceEpsilon,
                     LogBase base = {});
double js_divergence(std::span<const double> p, std::span<const double> q, double eps = kDivergenceEpsilon,
                     LogBase base = {});
double divergence(DivergenceKind kind, std::span<const double> p, std::span<const double> q,
                  double eps = kDivergenceEpsilon, LogBase base = {});

struct NearestVertex {
    double distance;
    std::size_t vertex_index;
};

// Smallest divergence from the one-hot target to any vertex; ties go to the
// lowest index.
NearestVertex min_divergence_to_vertices(const GroundTruth& y, const CredalVertices& v, DivergenceKind kind,
                                         double eps = kDivergenceEpsilon, LogBase base = {});

// Ratio max(KL) / max(JS) used to rescale a trade-off weight tuned for KL so
// it can be reused with JS. Throws when max_js is not positive.
double divergence_scale_factor(double max_kl, double max_js);
// lambda / scale_factor.
double rescale_lambda_for_js(double lambda, double scale_factor);

}  // namespace credeval
