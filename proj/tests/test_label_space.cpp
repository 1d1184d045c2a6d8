#include <doctest.h>

#include <set>

#include "credeval/errors.hpp"
#include "credeval/label_space.hpp"

using namespace credeval;

TEST_CASE("subset masks") {
    auto a = SubsetMask::from_bits(0b101);
    CHECK(a.count() == 2);
    CHECK(a.contains(0));
    CHECK_FALSE(a.contains(1));
    CHECK(a.members() == std::vector<int>{0, 2});
    CHECK(a.to_string() == "{0,2}");
    CHECK(a.complement(3) == SubsetMask::from_bits(0b010));
    CHECK(a.is_subset_of(SubsetMask::full(3)));
    CHECK_FALSE(SubsetMask::full(3).is_subset_of(a));
    CHECK(a.intersects(SubsetMask::singleton(2)));
    CHECK_FALSE(a.intersects(SubsetMask::singleton(1)));
    CHECK(SubsetMask{}.empty());
    CHECK(SubsetMask{}.bit_width() == 0);
    CHECK(a.bit_width() == 3);
}

TEST_CASE("masks beyond 64 classes") {
    auto full = SubsetMask::full(200);
    CHECK(full.count() == 200);
    CHECK(full.bit_width() == 200);
    CHECK_FALSE(full.fits_u64());
    auto hi = SubsetMask::singleton(150);
    CHECK(hi.is_subset_of(full));
    CHECK(hi.complement(200).count() == 199);
    CHECK(SubsetMask::singleton(3) < hi);
    CHECK(SubsetMask::full(64).count() == 64);
    CHECK(SubsetMask::full(64).fits_u64());
}

TEST_CASE("cardinality order puts smaller sets first") {
    std::set<SubsetMask, CardinalityOrder> s{SubsetMask::from_bits(0b11), SubsetMask::from_bits(0b100),
                                             SubsetMask::from_bits(0b1)};
    std::vector<std::uint64_t> order;
    for (auto& m : s) order.push_back(m.low_bits());
    CHECK(order == std::vector<std::uint64_t>{0b1, 0b100, 0b11});
}

TEST_CASE("label space validation") {
    CHECK_THROWS_AS(LabelSpace(1), ContractViolation);
    CHECK_THROWS_AS(LabelSpace(257), ContractViolation);
    CHECK_THROWS_AS(LabelSpace(2, {"cat", "cat"}), ContractViolation);
    CHECK_THROWS_AS(LabelSpace(3, {"a", "b"}), ContractViolation);
    LabelSpace y(3, {"cat", "dog", "eel"});
    CHECK(y.class_name(1) == "dog");
    CHECK(LabelSpace(4).class_name(2) == "2");
    CHECK(y.contains(SubsetMask::from_bits(0b111)));
    CHECK_FALSE(y.contains(SubsetMask::from_bits(0b1000)));
    CHECK(y.dense());
    CHECK_FALSE(LabelSpace(17).dense());
}
