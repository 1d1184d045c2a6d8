#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "credeval/credal.hpp"
#include "credeval/label_space.hpp"
#include "credeval/setfn.hpp"

namespace credeval {

enum class Encoding { point, samples, intervals, masses };

std::string_view to_string(Encoding e);
std::optional<Encoding> parse_encoding(std::string_view s);

// Single probability vector (softmax output, model average, ...).
struct PointPrediction {
    ProbabilityVector p;
};

using PredictionPayload = std::variant<PointPrediction, SampleSet, IntervalPrediction, MassFunction>;

// One test instance's raw prediction in one of the four encodings.
struct PredictionRecord {
    std::int64_t instance_id;
    PredictionPayload payload;

    Encoding encoding() const { return static_cast<Encoding>(payload.index()); }
    int num_classes() const;
};

}  // namespace credeval
