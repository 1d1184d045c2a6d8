#include "credeval/label_space.hpp"

#include <set>
#include <sstream>

#include "credeval/errors.hpp"

namespace credeval {

SubsetMask SubsetMask::full(int n) {
    SubsetMask m;
    for (int i = 0; i < kWords && n > 0; ++i, n -= 64)
        m.words_[i] = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    return m;
}

SubsetMask SubsetMask::complement(int n) const {
    SubsetMask all = full(n);
    SubsetMask r;
    for (int i = 0; i < kWords; ++i) r.words_[i] = all.words_[i] & ~words_[i];
    return r;
}

int SubsetMask::bit_width() const {
    for (int i = kWords - 1; i >= 0; --i)
        if (words_[i] != 0) return i * 64 + static_cast<int>(std::bit_width(words_[i]));
    return 0;
}

bool SubsetMask::fits_u64() const {
    for (int i = 1; i < kWords; ++i)
        if (words_[i] != 0) return false;
    return true;
}

std::vector<int> SubsetMask::members() const {
    std::vector<int> out;
    for (int i = 0; i < kWords; ++i) {
        std::uint64_t w = words_[i];
        while (w != 0) {
            out.push_back(i * 64 + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

std::string SubsetMask::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int c : members()) {
        if (!first) os << ',';
        os << c;
        first = false;
    }
    os << '}';
    return os.str();
}

LabelSpace::LabelSpace(int num_classes) : num_classes_(num_classes) {
    if (num_classes < 2 || num_classes > kMaxClasses)
        throw ContractViolation("label space needs between 2 and " + std::to_string(kMaxClasses) +
                                " classes, got " + std::to_string(num_classes));
}

LabelSpace::LabelSpace(int num_classes, std::vector<std::string> class_names)
    : LabelSpace(num_classes) {
    if (static_cast<int>(class_names.size()) != num_classes)
        throw ContractViolation("class name count does not match the number of classes");
    std::set<std::string> seen(class_names.begin(), class_names.end());
    if (seen.size() != class_names.size()) throw ContractViolation("class names must be distinct");
    names_ = std::move(class_names);
}

std::string LabelSpace::class_name(int cls) const {
    if (names_) return (*names_)[cls];
    return std::to_string(cls);
}

}  // namespace credeval
