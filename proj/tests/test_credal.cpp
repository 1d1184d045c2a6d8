#include <doctest.h>

#include <cmath>
#include <optional>

#include "credeval/credal.hpp"
#include "credeval/errors.hpp"
#include "credeval/setfn.hpp"
#include "helpers.hpp"

using namespace credeval;
using testutil::mask;
using testutil::same_vertices;

TEST_CASE("lower probability from samples") {
    auto lp = lower_prob_from_samples(testutil::fixture_samples());
    CHECK(lp.at(mask(1)) == doctest::Approx(0.4));
    CHECK(lp.at(mask(2)) == doctest::Approx(0.3));
    CHECK(lp.at(mask(3)) == 1.0);

    SampleSet one(LabelSpace(3), std::vector<ProbabilityVector>{{0.2, 0.5, 0.3}});
    auto single = lower_prob_from_samples(one);
    CHECK(single.at(mask(0b101)) == doctest::Approx(0.5));
    CHECK(single.at(mask(0b011)) == doctest::Approx(0.7));

    SampleSet conflict(LabelSpace(2), std::vector<ProbabilityVector>{{1, 0}, {0, 1}});
    auto vac = lower_prob_from_samples(conflict);
    CHECK(vac.at(mask(1)) == 0.0);
    CHECK(vac.at(mask(2)) == 0.0);
    CHECK(vac.at(mask(3)) == 1.0);
}

TEST_CASE("lower probability on an explicit family") {
    auto s = testutil::fixture_samples();
    std::vector<SubsetMask> family{mask(1), mask(2), mask(3)};
    CHECK(lower_prob_from_samples(s, family).at(mask(1)) == doctest::Approx(0.4));
    std::vector<SubsetMask> no_full{mask(1), mask(2)};
    CHECK_THROWS_AS(lower_prob_from_samples(s, no_full), ContractViolation);
    std::vector<SubsetMask> empty;
    CHECK_THROWS_AS(lower_prob_from_samples(s, empty), ContractViolation);
}

TEST_CASE("sample set validation") {
    CHECK_THROWS_AS(SampleSet(LabelSpace(2), std::vector<ProbabilityVector>{{0.5, 0.6}}), ContractViolation);
    CHECK_THROWS_AS(SampleSet(LabelSpace(2), std::vector<ProbabilityVector>{{1.1, -0.1}}), ContractViolation);
    CHECK_THROWS_AS(SampleSet(LabelSpace(2), std::vector<ProbabilityVector>{}), ContractViolation);
    CHECK_THROWS_AS(SampleSet(LabelSpace(2), std::vector<ProbabilityVector>{{0.5, 0.25, 0.25}}), ContractViolation);
    CHECK_NOTHROW(SampleSet(LabelSpace(2), std::vector<ProbabilityVector>{{0.5, 0.5 + 5e-7}}));
}

TEST_CASE("budget subset selection") {
    SUBCASE("prefix reaches the full set") {
        SampleSet s(LabelSpace(3), std::vector<ProbabilityVector>{{0.6, 0.3, 0.1}});
        auto fam = select_budget_subsets(s, 5);
        CHECK(fam == std::vector<SubsetMask>{mask(1), mask(2), mask(4), mask(7)});
    }
    SUBCASE("two classes, budget three") {
        SampleSet s(LabelSpace(2), std::vector<ProbabilityVector>{{0.9, 0.1}});
        CHECK(select_budget_subsets(s, 3) == std::vector<SubsetMask>{mask(1), mask(2), mask(3)});
    }
    SUBCASE("shared prefix") {
        SampleSet s(LabelSpace(3), std::vector<ProbabilityVector>{{0.5, 0.45, 0.05}, {0.48, 0.48, 0.04}});
        CHECK(select_budget_subsets(s, 5) == std::vector<SubsetMask>{mask(1), mask(2), mask(4), mask(3), mask(7)});
    }
    SUBCASE("budget too small") {
        SampleSet s(LabelSpace(3), std::vector<ProbabilityVector>{{0.6, 0.3, 0.1}});
        CHECK_THROWS_AS(select_budget_subsets(s, 3), ContractViolation);
    }
    SUBCASE("frequency ranking with ties to the smaller mask") {
        BudgetSelector sel(LabelSpace(4));
        std::vector<double> a{0.5, 0.48, 0.01, 0.01};  // {0,1}
        std::vector<double> b{0.01, 0.01, 0.5, 0.48};  // {2,3}
        std::vector<double> c{0.5, 0.01, 0.48, 0.01};  // {0,2}
        sel.add(a);
        sel.add(b);
        sel.add(b);
        sel.add(c);
        auto fam = sel.select(6);  // room for one extra
        CHECK(std::find(fam.begin(), fam.end(), mask(0b1100)) != fam.end());
        auto fam2 = sel.select(7);
        CHECK(std::find(fam2.begin(), fam2.end(), mask(0b0011)) != fam2.end());
        CHECK(std::find(fam2.begin(), fam2.end(), mask(0b0101)) == fam2.end());
    }
}

TEST_CASE("exact vertices") {
    CHECK(same_vertices(vertices_exact(testutil::fixture_mass()), {{0.7, 0.3}, {0.4, 0.6}}));
    MassFunction m3(LabelSpace(3), {{mask(1), 0.5}, {mask(3), 0.3}, {mask(7), 0.2}});
    auto v = vertices_exact(m3);
    CHECK(same_vertices(v, {{1, 0, 0}, {0.5, 0.5, 0}, {0.8, 0, 0.2}, {0.5, 0.3, 0.2}}));
    CHECK(v.provenance() == VertexProvenance::exact);
    std::vector<double> p{0.7, 0.3};
    CHECK(vertices_exact(MassFunction::bayesian(LabelSpace(2), p)).size() == 1);
    CHECK_THROWS_AS(vertices_exact(MassFunction::vacuous(LabelSpace(9))), CapacityError);
}

TEST_CASE("approximate vertices") {
    CHECK(same_vertices(vertices_approx(testutil::fixture_mass()), {{0.7, 0.3}, {0.4, 0.6}}));
    CHECK(same_vertices(vertices_approx(MassFunction::vacuous(LabelSpace(3))), {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    std::vector<double> p{0.2, 0.3, 0.5};
    CHECK(vertices_approx(MassFunction::bayesian(LabelSpace(3), p)).size() == 1);
    // works far above the exact cap
    auto big = vertices_approx(MassFunction::vacuous(LabelSpace(40)));
    CHECK(big.size() == 40);
    CHECK(big.provenance() == VertexProvenance::approximate);
}

TEST_CASE("parallel exact vertices match the serial list") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 40; ++t) {
        auto m = testutil::random_mass(rng, 2 + t % 7, 20);
        auto a = vertices_exact(m);
        auto b = vertices_exact_parallel(m);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.vertices()[i] == b.vertices()[i]);
    }
}

TEST_CASE("approximate vertices are exact vertices and attain plausibility") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 300; ++t) {
        const int n = 2 + t % 7;
        auto m = testutil::random_mass(rng, n);
        auto exact = vertices_exact(m);
        auto approx = vertices_approx(m);
        CHECK(approx.size() <= static_cast<std::size_t>(2 * n));
        for (const auto& v : approx.vertices()) CHECK(exact.contains(v));
        for (int c = 0; c < n; ++c) {
            double hi = 0.0, lo = 1.0;
            for (const auto& v : exact.vertices()) {
                hi = std::max(hi, v[c]);
                lo = std::min(lo, v[c]);
            }
            CHECK(hi == doctest::Approx(plausibility(m, SubsetMask::singleton(c))).epsilon(1e-12));
            CHECK(credal_width(approx, c) == doctest::Approx(credal_width(exact, c)).epsilon(1e-12));
        }
        for (const auto& v : exact.vertices()) {
            double s = 0.0;
            for (double x : v) s += x;
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("minimum vertex coordinate is the singleton mass for singleton-plus-full masses") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + t % 5;
        auto p = testutil::random_distribution(rng, n, 0.0);
        std::vector<FocalElement> focal;
        for (int c = 0; c < n; ++c) focal.push_back({SubsetMask::singleton(c), 0.6 * p[c]});
        focal.push_back({SubsetMask::full(n), 0.4});
        MassFunction m(LabelSpace(n), focal);
        auto v = vertices_exact(m);
        for (int c = 0; c < n; ++c) {
            double lo = 1.0;
            for (const auto& x : v.vertices()) lo = std::min(lo, x[c]);
            CHECK(lo == doctest::Approx(m.mass(SubsetMask::singleton(c))));
        }
    }
}

TEST_CASE("samples lie inside the credal set they induce") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + t % 5;
        auto s = testutil::random_samples(rng, n, 1 + t % 12);
        auto lp = lower_prob_from_samples(s);
        for (const auto& [a, v] : lp.values())
            for (std::size_t k = 0; k < s.num_samples(); ++k) {
                double pa = 0.0;
                for (int c : a.members()) pa += s.sample(k)[c];
                CHECK(pa >= v - 1e-12);
            }
    }
}

TEST_CASE("credal width shrinks as samples are removed") {
    // Lower probabilities can only rise when samples go away. Widths follow
    // whenever the Möbius step needed no clamping; a clamped-and-renormalized
    // mass is no longer the exact envelope, so no ordering is promised there.
    std::mt19937_64 rng(17);
    int compared = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 4;
        std::vector<ProbabilityVector> rows;
        for (int k = 0; k < 8; ++k) rows.push_back(testutil::random_distribution(rng, n));
        std::optional<LowerProbability> prev_lp;
        double prev_w = 2.0;
        bool prev_clamped = true;
        for (int k = 8; k >= 1; --k) {
            SampleSet s(LabelSpace(n), std::vector<ProbabilityVector>(rows.begin(), rows.begin() + k));
            auto lp = lower_prob_from_samples(s);
            if (prev_lp)
                for (const auto& [a, v] : lp.values()) CHECK(v >= prev_lp->at(a) - 1e-15);
            auto r = mobius_inverse_detailed(lp);
            const bool clamped = r.clamped_negative < -1e-12;
            const double w = credal_width(vertices_exact(r.mass), 0);
            if (!clamped && !prev_clamped) {
                CHECK(w <= prev_w + 1e-9);
                ++compared;
            }
            if (n == 2) CHECK_FALSE(clamped);
            prev_lp = lp;
            prev_w = w;
            prev_clamped = clamped;
        }
    }
    CHECK(compared > 300);
}

TEST_CASE("interval credal sets") {
    LabelSpace y(2);
    IntervalPrediction ip(y, {0.4, 0.3}, {0.7, 0.6});
    CHECK(same_vertices(credal_from_intervals(ip), {{0.7, 0.3}, {0.4, 0.6}}));
    CHECK(same_vertices(credal_from_intervals(IntervalPrediction(y, {0.5, 0.5}, {0.5, 0.5})), {{0.5, 0.5}}));
    CHECK(same_vertices(credal_from_intervals(IntervalPrediction(y, {0, 0}, {1, 1})), {{1, 0}, {0, 1}}));
    CHECK_THROWS_AS(IntervalPrediction(y, {0.6, 0.6}, {0.9, 0.9}), InfeasibleInputError);
    CHECK_THROWS_AS(IntervalPrediction(y, {0.1, 0.1}, {0.4, 0.4}), InfeasibleInputError);
    CHECK_THROWS_AS(IntervalPrediction(y, {0.5, 0.1}, {0.4, 0.9}), ContractViolation);

    // unreachable upper bound is tightened: upper_0 can be at most 1 - lower_1
    IntervalPrediction loose(y, {0.0, 0.5}, {0.9, 1.0});
    auto r = loose.reachable();
    CHECK(r.upper()[0] == doctest::Approx(0.5));
    auto lp = lower_prob_from_intervals(loose);
    CHECK(lp.at(mask(2)) == doctest::Approx(0.5));
}

TEST_CASE("interval widths equal the reachable intervals when no mass is clamped") {
    std::mt19937_64 rng(19);
    int compared = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 4;
        auto ip = testutil::random_intervals(rng, n);
        auto r = ip.reachable();
        auto lp = lower_prob_from_intervals(ip);
        // envelope by definition
        for (const auto& [a, v] : lp.values()) {
            double lo = 0.0, out = 0.0;
            for (int c = 0; c < n; ++c) {
                if (a.contains(c)) lo += r.lower()[c];
                else out += r.upper()[c];
            }
            CHECK(v == doctest::Approx(std::max(lo, 1.0 - out)).epsilon(1e-12));
        }
        auto mob = mobius_inverse_detailed(lp);
        if (mob.clamped_negative < -1e-12) continue;
        ++compared;
        auto v = credal_from_intervals(ip);
        for (int c = 0; c < n; ++c)
            CHECK(credal_width(v, c) == doctest::Approx(r.upper()[c] - r.lower()[c]).epsilon(1e-9));
    }
    CHECK(compared > 50);
}

TEST_CASE("intervals from samples") {
    auto ip = intervals_from_samples(testutil::fixture_samples());
    CHECK(testutil::near(ip.lower(), {0.4, 0.3}));
    CHECK(testutil::near(ip.upper(), {0.7, 0.6}));
    SampleSet one(LabelSpace(2), std::vector<ProbabilityVector>{{0.2, 0.8}});
    auto p = intervals_from_samples(one);
    CHECK(p.lower() == p.upper());
    SampleSet conflict(LabelSpace(2), std::vector<ProbabilityVector>{{1, 0}, {0, 1}});
    auto q = intervals_from_samples(conflict);
    CHECK(testutil::near(q.lower(), {0, 0}));
    CHECK(testutil::near(q.upper(), {1, 1}));
}

TEST_CASE("credal width") {
    CredalVertices v(LabelSpace(2), {{0.7, 0.3}, {0.4, 0.6}}, VertexProvenance::exact);
    CHECK(credal_width(v, 0) == doctest::Approx(0.3));
    CredalVertices one(LabelSpace(2), {{0.7, 0.3}}, VertexProvenance::native);
    CHECK(credal_width(one, 1) == 0.0);
    CHECK(credal_width(vertices_approx(MassFunction::vacuous(LabelSpace(5))), 3) == 1.0);
    CHECK_THROWS_AS(credal_width(v, 2), ContractViolation);
}

TEST_CASE("vertex deduplication keeps first occurrences") {
    CredalVertices v(LabelSpace(2), {{0.7, 0.3}, {0.4, 0.6}, {0.7 + 1e-12, 0.3 - 1e-12}, {0.4, 0.6}},
                     VertexProvenance::exact);
    REQUIRE(v.size() == 2);
    CHECK(v.vertices()[0] == ProbabilityVector{0.7, 0.3});
    CHECK_THROWS_AS(CredalVertices(LabelSpace(2), {}, VertexProvenance::exact), ContractViolation);
    CHECK_THROWS_AS(CredalVertices(LabelSpace(2), {{0.7, 0.2}}, VertexProvenance::exact), ContractViolation);
}
