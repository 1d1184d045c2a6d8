#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "credeval/evaluator.hpp"
#include "credeval/prediction.hpp"

namespace credeval {

// File formats (all UTF-8 JSON, one family):
//
//   manifest       a JSON document {"models": [ {...}, ... ]}
//   predictions    JSON Lines; line 1 is a header
//                    {"format":"credeval-predictions","encoding":"samples","num_classes":10}
//                  followed by one record per instance, ascending "id":
//                    point      {"id":0,"p":[...]}
//                    samples    {"id":0,"samples":[[...],...]}
//                    intervals  {"id":0,"lower":[...],"upper":[...]}
//                    masses     {"id":0,"focal":[[bitmask,mass],...]}
//   labels         plain text, one class index per line; line k (0-based) is instance k
//   results        JSON Lines (summary.jsonl, rankings.jsonl, per_instance.jsonl)

struct ModelManifest {
    std::string model_id;
    Encoding encoding;
    int num_classes;
    std::filesystem::path predictions_path;
    std::optional<int> budget;
    std::optional<int> num_samples;
};

std::vector<ModelManifest> load_manifest(const std::filesystem::path& path);

std::vector<int> load_labels(const std::filesystem::path& path);

struct RowError {
    std::size_t line;  // 1-based line in the predictions file
    std::optional<std::int64_t> instance_id;
    std::string message;
};

using ReadResult = std::variant<PredictionRecord, RowError>;

// Streams records from a predictions file one line at a time. Header problems
// throw LoadError from the constructor; bad rows come back as RowError.
class PredictionReader {
public:
    explicit PredictionReader(const ModelManifest& manifest);

    // nullopt at end of file.
    std::optional<ReadResult> next();
    std::size_t warnings() const { return no_singleton_rows_; }

private:
    ReadResult parse_row(const std::string& line);

    ModelManifest manifest_;
    LabelSpace space_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
    std::optional<std::int64_t> last_id_;
    std::size_t no_singleton_rows_ = 0;
};

// Convenience: read every row of a predictions file.
std::vector<ReadResult> load_predictions(const ModelManifest& manifest);

// Round to six significant digits, the precision used in every results file.
double round_sig6(double x);

struct InstanceRow {
    std::string model_id;
    EvaluationRecord record;
};

inline constexpr const char* kSummaryFile = "summary.jsonl";
inline constexpr const char* kRankingsFile = "rankings.jsonl";
inline constexpr const char* kPerInstanceFile = "per_instance.jsonl";

struct RunMetadata {
    DivergenceKind divergence = DivergenceKind::kl;
    NsKind ns = NsKind::dubois;
};

void write_summaries(const std::filesystem::path& file, const std::vector<ModelSummary>& summaries,
                     const RunMetadata& meta);
void write_rankings(const std::filesystem::path& file, const RankingTable& rankings);
void write_per_instance(const std::filesystem::path& file, const std::vector<InstanceRow>& rows);

// Writes summary and rankings files, plus per-instance records when
// `per_instance` is non-null. Creates `out_dir` if needed.
void write_results(const std::vector<ModelSummary>& summaries, const RankingTable& rankings,
                   const std::vector<InstanceRow>* per_instance, const std::filesystem::path& out_dir,
                   const RunMetadata& meta = {});

std::vector<ModelSummary> read_summaries(const std::filesystem::path& file);
RankingTable read_rankings(const std::filesystem::path& file);
std::vector<InstanceRow> read_per_instance(const std::filesystem::path& file);

}  // namespace credeval
