#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "credeval/credal.hpp"
#include "credeval/divergence.hpp"
#include "credeval/prediction.hpp"
#include "credeval/setfn.hpp"

namespace credeval {

enum class NsKind { dubois, smets, korner, credal_uncertainty };

std::string_view to_string(NsKind k);
std::string_view to_string(DivergenceKind k);
std::string_view to_string(VertexMode m);

// Sample and interval predictions use the full powerset up to this many
// classes unless a budget is given; above it they use a budgeted family.
inline constexpr int kDefaultFullPowersetClasses = 10;
// Extra subsets (beyond singletons and the full set) in the default budget.
inline constexpr int kDefaultExtraSubsets = 30;

struct EvalConfig {
    double lambda = 1.0;
    DivergenceKind divergence_kind = DivergenceKind::kl;
    NsKind ns_kind = NsKind::dubois;
    VertexMode vertex_mode = VertexMode::approximate;
    LogBase log_base{};
    double epsilon = kDivergenceEpsilon;
    // Subset budget for sample/interval predictions; nullopt picks the full
    // powerset when N <= full_powerset_max_classes, else N + 1 + 30.
    std::optional<int> budget;
    int full_powerset_max_classes = kDefaultFullPowersetClasses;

    void validate() const;
    int effective_budget(int num_classes) const;
};

// Intermediate representations built for one prediction.
struct CredalPrediction {
    std::optional<LowerProbability> lower;
    std::optional<MassFunction> mass;
    std::optional<IntervalPrediction> intervals;
    CredalVertices vertices;
    ProbabilityVector summary;  // point summary used for the predicted class
};

CredalPrediction build_credal(const PredictionRecord& pred, const EvalConfig& cfg);

struct EvaluationRecord {
    std::int64_t instance_id = 0;
    double d = 0.0;
    double ns = 0.0;
    double e = 0.0;
    bool correct = false;
    int predicted_class = 0;
    std::size_t nearest_vertex_index = 0;
    double credal_width = 0.0;
    double confidence = 0.0;
};

// Argmax of the point summary (ties to the lowest index).
int predicted_class(const PredictionRecord& pred);
ProbabilityVector point_summary(const PredictionRecord& pred);

EvaluationRecord evaluate_instance(const PredictionRecord& pred, const GroundTruth& y, const EvalConfig& cfg);

struct Stats {
    double mean = 0.0;
    double std = 0.0;  // population

    bool operator==(const Stats&) const = default;
};

struct SplitStats {
    std::size_t count = 0;
    Stats d, ns, e;

    bool operator==(const SplitStats&) const = default;
};

struct ModelSummary {
    std::string model_id;
    double lambda = 1.0;
    SplitStats all, cc, icc;
    double accuracy = 0.0;
    double ece = 0.0;
    std::size_t failures = 0;

    bool operator==(const ModelSummary&) const = default;
};

ModelSummary aggregate(std::span<const EvaluationRecord> records, std::string model_id = {}, double lambda = 1.0);

struct RankEntry {
    std::string model_id;
    double e;

    bool operator==(const RankEntry&) const = default;
};

struct RankingRow {
    double lambda;
    std::vector<RankEntry> entries;  // ascending E

    bool operator==(const RankingRow&) const = default;
};

using RankingTable = std::vector<RankingRow>;

// For each lambda: mean d + lambda * mean NS per model, ascending, ties by id.
RankingTable rank_models(std::span<const ModelSummary> summaries, std::span<const double> lambdas);

// start, start+step, ... up to stop (inclusive within rounding).
std::vector<double> lambda_grid(double start, double stop, double step);

inline constexpr int kEceBins = 15;
double expected_calibration_error(std::span<const double> confidences, std::span<const bool> correct,
                                  int bins = kEceBins);

// Outcome of one instance inside a batch: a record or the reason it failed.
struct InstanceFailure {
    std::int64_t instance_id;
    std::string message;
};
using InstanceOutcome = std::variant<EvaluationRecord, InstanceFailure>;

// Labels are indexed by instance id.
std::vector<InstanceOutcome> evaluate_batch_serial(std::span<const PredictionRecord> preds,
                                                   std::span<const int> labels, const EvalConfig& cfg);
// OpenMP fan-out over instances; output order and values match the serial
// version exactly.
std::vector<InstanceOutcome> evaluate_batch(std::span<const PredictionRecord> preds, std::span<const int> labels,
                                            const EvalConfig& cfg);

}  // namespace credeval
