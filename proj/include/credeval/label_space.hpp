#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace credeval {

// Label spaces are capped so that a subset fits in a fixed 256-bit pattern.
inline constexpr int kMaxClasses = 256;

// Above this size the powerset is never materialized; operations work on an
// explicit subset family instead.
inline constexpr int kMaxDenseClasses = 16;

// A subset A of the label space as a bit pattern: bit i set iff class i is in A.
class SubsetMask {
public:
    static constexpr int kWords = kMaxClasses / 64;

    constexpr SubsetMask() = default;

    static SubsetMask from_bits(std::uint64_t bits) {
        SubsetMask m;
        m.words_[0] = bits;
        return m;
    }
    static SubsetMask singleton(int cls) {
        SubsetMask m;
        m.set(cls);
        return m;
    }
    // The whole label space {0, ..., n-1}.
    static SubsetMask full(int n);

    void set(int cls) { words_[cls >> 6] |= std::uint64_t{1} << (cls & 63); }
    void reset(int cls) { words_[cls >> 6] &= ~(std::uint64_t{1} << (cls & 63)); }
    bool contains(int cls) const { return (words_[cls >> 6] >> (cls & 63)) & 1U; }

    int count() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }
    bool empty() const {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }
    bool is_subset_of(const SubsetMask& other) const {
        for (int i = 0; i < kWords; ++i)
            if ((words_[i] & ~other.words_[i]) != 0) return false;
        return true;
    }
    bool intersects(const SubsetMask& other) const {
        for (int i = 0; i < kWords; ++i)
            if ((words_[i] & other.words_[i]) != 0) return true;
        return false;
    }
    // Complement relative to a label space of n classes.
    SubsetMask complement(int n) const;

    // Index of the highest set bit plus one; 0 for the empty set.
    int bit_width() const;
    bool fits_u64() const;
    // Low 64 bits. Callers must check fits_u64() when the upper words matter.
    std::uint64_t low_bits() const { return words_[0]; }

    // Member classes in ascending order.
    std::vector<int> members() const;
    std::string to_string() const;

    SubsetMask operator|(const SubsetMask& o) const {
        SubsetMask r;
        for (int i = 0; i < kWords; ++i) r.words_[i] = words_[i] | o.words_[i];
        return r;
    }
    SubsetMask operator&(const SubsetMask& o) const {
        SubsetMask r;
        for (int i = 0; i < kWords; ++i) r.words_[i] = words_[i] & o.words_[i];
        return r;
    }

    bool operator==(const SubsetMask&) const = default;
    // Numeric order of the bit pattern.
    std::strong_ordering operator<=>(const SubsetMask& o) const {
        for (int i = kWords - 1; i >= 0; --i)
            if (words_[i] != o.words_[i]) return words_[i] <=> o.words_[i];
        return std::strong_ordering::equal;
    }

    std::size_t hash() const {
        std::size_t h = 0;
        for (auto w : words_) h = h * 0x9E3779B97F4A7C15ULL ^ std::hash<std::uint64_t>{}(w);
        return h;
    }

private:
    std::array<std::uint64_t, kWords> words_{};
};

struct SubsetMaskHash {
    std::size_t operator()(const SubsetMask& m) const { return m.hash(); }
};

// Orders subsets by cardinality, then by bit pattern. Möbius recursion and
// file output both use this order.
struct CardinalityOrder {
    bool operator()(const SubsetMask& a, const SubsetMask& b) const {
        const int ca = a.count(), cb = b.count();
        if (ca != cb) return ca < cb;
        return a < b;
    }
};

// The class set Y = {c_0, ..., c_{N-1}}.
class LabelSpace {
public:
    explicit LabelSpace(int num_classes);
    LabelSpace(int num_classes, std::vector<std::string> class_names);

    int size() const { return num_classes_; }
    const std::optional<std::vector<std::string>>& class_names() const { return names_; }
    std::string class_name(int cls) const;

    SubsetMask full_set() const { return SubsetMask::full(num_classes_); }
    bool dense() const { return num_classes_ <= kMaxDenseClasses; }
    bool contains(const SubsetMask& a) const { return a.bit_width() <= num_classes_; }

    bool operator==(const LabelSpace& o) const { return num_classes_ == o.num_classes_; }

private:
    int num_classes_;
    std::optional<std::vector<std::string>> names_;
};

using ProbabilityVector = std::vector<double>;

}  // namespace credeval
