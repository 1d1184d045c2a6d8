#include <doctest.h>

#include <cmath>

#include "credeval/divergence.hpp"
#include "credeval/errors.hpp"
#include "helpers.hpp"

using namespace credeval;

namespace {
std::vector<double> v(std::initializer_list<double> xs) { return xs; }
}

TEST_CASE("kl divergence") {
    CHECK(kl_divergence(v({1, 0}), v({0.7, 0.3})) == doctest::Approx(0.356675).epsilon(1e-6));
    CHECK(kl_divergence(v({0.5, 0.5}), v({0.5, 0.5})) == 0.0);
    CHECK(kl_divergence(v({1, 0}), v({0.5, 0.5})) == doctest::Approx(0.693147).epsilon(1e-6));
    // zero denominators clamp at epsilon
    CHECK(kl_divergence(v({1, 0}), v({0, 1})) == doctest::Approx(-std::log(1e-12)));
    CHECK_THROWS_AS(kl_divergence(v({1, 0}), v({0.2, 0.3, 0.5})), ContractViolation);
    // base 2
    CHECK(kl_divergence(v({1, 0}), v({0.5, 0.5}), kDivergenceEpsilon, LogBase{2.0}) == doctest::Approx(1.0));
}

TEST_CASE("js divergence") {
    CHECK(js_divergence(v({1, 0}), v({0.5, 0.5})) == doctest::Approx(0.215762).epsilon(1e-6));
    CHECK(js_divergence(v({0.3, 0.7}), v({0.3, 0.7})) == 0.0);
    CHECK(js_divergence(v({1, 0}), v({0, 1})) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(js_divergence(v({1}), v({0.5, 0.5})), ContractViolation);

    std::mt19937_64 rng(23);
    for (int t = 0; t < 200; ++t) {
        auto p = testutil::random_distribution(rng, 5, 0.4);
        auto q = testutil::random_distribution(rng, 5, 0.4);
        const double a = js_divergence(p, q), b = js_divergence(q, p);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a <= std::log(2.0) + 1e-12);
        CHECK(a >= 0.0);
        CHECK(kl_divergence(p, q) >= 0.0);
        CHECK(kl_divergence(p, q) <= -std::log(1e-12) + 1e-9);
    }
}

TEST_CASE("nearest vertex") {
    CredalVertices vs(LabelSpace(2), {{0.7, 0.3}, {0.4, 0.6}}, VertexProvenance::exact);
    auto a = min_divergence_to_vertices(GroundTruth{0}, vs, DivergenceKind::kl);
    CHECK(a.distance == doctest::Approx(0.356675).epsilon(1e-6));
    CHECK(a.vertex_index == 0);
    auto b = min_divergence_to_vertices(GroundTruth{1}, vs, DivergenceKind::kl);
    CHECK(b.distance == doctest::Approx(0.510826).epsilon(1e-6));
    CHECK(b.vertex_index == 1);
    CredalVertices perfect(LabelSpace(2), {{1, 0}}, VertexProvenance::native);
    auto c = min_divergence_to_vertices(GroundTruth{0}, perfect, DivergenceKind::kl);
    CHECK(c.distance == 0.0);
    CHECK(c.vertex_index == 0);
    CHECK_THROWS_AS(min_divergence_to_vertices(GroundTruth{2}, vs, DivergenceKind::kl), ContractViolation);
}

TEST_CASE("nearest vertex ties go to the lowest index") {
    CredalVertices vs(LabelSpace(3), {{0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}}, VertexProvenance::exact);
    CHECK(min_divergence_to_vertices(GroundTruth{0}, vs, DivergenceKind::kl).vertex_index == 0);
    CHECK(min_divergence_to_vertices(GroundTruth{0}, vs, DivergenceKind::js).vertex_index == 0);
}

TEST_CASE("nearest vertex KL equals minus log plausibility") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 300; ++t) {
        const int n = 2 + t % 7;
        auto m = testutil::random_mass(rng, n);
        auto verts = vertices_exact(m);
        for (int y = 0; y < n; ++y) {
            const double pl = plausibility(m, SubsetMask::singleton(y));
            const double d = min_divergence_to_vertices(GroundTruth{y}, verts, DivergenceKind::kl).distance;
            CHECK(std::abs(d + std::log(std::max(pl, 1e-12))) < 1e-9);
        }
    }
}

TEST_CASE("adding vertices never increases the distance") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; ++t) {
        std::vector<ProbabilityVector> vs;
        double prev = INFINITY;
        for (int k = 0; k < 6; ++k) {
            vs.push_back(testutil::random_distribution(rng, 4));
            CredalVertices cv(LabelSpace(4), vs, VertexProvenance::exact);
            for (auto kind : {DivergenceKind::kl, DivergenceKind::js}) {
                const double d = min_divergence_to_vertices(GroundTruth{1}, cv, kind).distance;
                if (kind == DivergenceKind::kl) {
                    CHECK(d <= prev + 1e-15);
                    prev = d;
                }
            }
        }
    }
}

TEST_CASE("lambda rescaling helper") {
    const double f = divergence_scale_factor(-std::log(1e-12), std::log(2.0));
    CHECK(f == doctest::Approx(-std::log(1e-12) / std::log(2.0)));
    CHECK(rescale_lambda_for_js(1.0, 2.0) == 0.5);
    CHECK_THROWS_AS(divergence_scale_factor(1.0, 0.0), ContractViolation);
}
