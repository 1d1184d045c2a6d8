#include "credeval/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "credeval/errors.hpp"
#include "credeval/uncertainty.hpp"

namespace credeval {

namespace {

int argmax(std::span<const double> p) {
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<SubsetMask> family_for(const LabelSpace& space, const EvalConfig& cfg, const BudgetSelector& selector) {
    if (!cfg.budget && space.dense() && space.size() <= cfg.full_powerset_max_classes) return full_family(space);
    return selector.select(cfg.effective_budget(space.size()));
}

IntervalPrediction intervals_from_mass(const MassFunction& m) {
    const int n = m.space().size();
    ProbabilityVector lo(n), hi(n);
    for (int c = 0; c < n; ++c) {
        const auto s = SubsetMask::singleton(c);
        lo[c] = m.mass(s);
        hi[c] = std::clamp(plausibility(m, s), lo[c], 1.0);
    }
    return IntervalPrediction(m.space(), std::move(lo), std::move(hi));
}

CredalVertices vertices_for(const MassFunction& m, VertexMode mode) {
    return mode == VertexMode::exact ? vertices_exact(m) : vertices_approx(m);
}

Stats stats_of(const std::vector<double>& v) {
    if (v.empty()) return {};
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / n)};
}

SplitStats split_stats(std::span<const EvaluationRecord> records, int which) {
    std::vector<double> d, ns, e;
    for (const auto& r : records) {
        if (which == 1 && !r.correct) continue;
        if (which == 2 && r.correct) continue;
        d.push_back(r.d);
        ns.push_back(r.ns);
        e.push_back(r.e);
    }
    return {d.size(), stats_of(d), stats_of(ns), stats_of(e)};
}

InstanceOutcome evaluate_one(const PredictionRecord& pred, std::span<const int> labels, const EvalConfig& cfg) {
    try {
        if (pred.instance_id < 0 || static_cast<std::size_t>(pred.instance_id) >= labels.size())
            throw ContractViolation("no label for instance " + std::to_string(pred.instance_id));
        const int label = labels[static_cast<std::size_t>(pred.instance_id)];
        if (label < 0 || label >= pred.num_classes())
            throw ContractViolation("label " + std::to_string(label) + " is outside the model's " +
                                    std::to_string(pred.num_classes()) + " classes");
        return evaluate_instance(pred, GroundTruth{label}, cfg);
    } catch (const std::exception& ex) {
        return InstanceFailure{pred.instance_id, ex.what()};
    }
}

}  // namespace

std::string_view to_string(Encoding e) {
    switch (e) {
        case Encoding::point: return "point";
        case Encoding::samples: return "samples";
        case Encoding::intervals: return "intervals";
        case Encoding::masses: return "masses";
    }
    return "?";
}

std::optional<Encoding> parse_encoding(std::string_view s) {
    if (s == "point") return Encoding::point;
    if (s == "samples") return Encoding::samples;
    if (s == "intervals") return Encoding::intervals;
    if (s == "masses") return Encoding::masses;
    return std::nullopt;
}

int PredictionRecord::num_classes() const {
    return std::visit(
        [](const auto& p) -> int {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PointPrediction>)
                return static_cast<int>(p.p.size());
            else
                return p.space().size();
        },
        payload);
}

std::string_view to_string(NsKind k) {
    switch (k) {
        case NsKind::dubois: return "dubois";
        case NsKind::smets: return "smets";
        case NsKind::korner: return "korner";
        case NsKind::credal_uncertainty: return "cu";
    }
    return "?";
}

std::string_view to_string(DivergenceKind k) { return k == DivergenceKind::kl ? "kl" : "js"; }

std::string_view to_string(VertexMode m) { return m == VertexMode::exact ? "exact" : "approx"; }

void EvalConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ContractViolation("lambda must be a nonnegative number");
    if (!(epsilon > 0.0) || epsilon > 1e-6) throw ContractViolation("epsilon must lie in (0, 1e-6]");
    log_base.scale();
    if (budget && *budget < 3) throw ContractViolation("budget must be at least N+1");
}

int EvalConfig::effective_budget(int num_classes) const {
    return budget ? *budget : num_classes + 1 + kDefaultExtraSubsets;
}

ProbabilityVector point_summary(const PredictionRecord& pred) {
    return std::visit(
        [](const auto& p) -> ProbabilityVector {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PointPrediction>)
                return p.p;
            else if constexpr (std::is_same_v<T, SampleSet>)
                return p.mean();
            else if constexpr (std::is_same_v<T, IntervalPrediction>)
                return p.midpoint();
            else
                return pignistic(p);
        },
        pred.payload);
}

int predicted_class(const PredictionRecord& pred) { return argmax(point_summary(pred)); }

CredalPrediction build_credal(const PredictionRecord& pred, const EvalConfig& cfg) {
    return std::visit(
        [&](const auto& p) -> CredalPrediction {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PointPrediction>) {
                const LabelSpace space(static_cast<int>(p.p.size()));
                CredalVertices v(space, {p.p}, VertexProvenance::native);
                return {std::nullopt, MassFunction::bayesian(space, p.p), std::nullopt, std::move(v), p.p};
            } else if constexpr (std::is_same_v<T, SampleSet>) {
                BudgetSelector selector(p.space());
                selector.add(p);
                const auto family = family_for(p.space(), cfg, selector);
                LowerProbability lp = lower_prob_from_samples(p, family);
                MassFunction m = mobius_inverse(lp);
                CredalVertices v = vertices_for(m, cfg.vertex_mode);
                return {std::move(lp), std::move(m), intervals_from_samples(p), std::move(v), p.mean()};
            } else if constexpr (std::is_same_v<T, IntervalPrediction>) {
                BudgetSelector selector(p.space());
                const ProbabilityVector mid = p.midpoint();
                selector.add(mid);
                const auto family = family_for(p.space(), cfg, selector);
                LowerProbability lp = lower_prob_from_intervals(p, family);
                MassFunction m = mobius_inverse(lp);
                CredalVertices v = vertices_for(m, cfg.vertex_mode);
                return {std::move(lp), std::move(m), p, std::move(v), mid};
            } else {
                CredalVertices v = vertices_for(p, cfg.vertex_mode);
                return {std::nullopt, p, intervals_from_mass(p), std::move(v), pignistic(p)};
            }
        },
        pred.payload);
}

EvaluationRecord evaluate_instance(const PredictionRecord& pred, const GroundTruth& y, const EvalConfig& cfg) {
    const CredalPrediction cp = build_credal(pred, cfg);
    if (y.true_class < 0 || y.true_class >= cp.vertices.space().size())
        throw ContractViolation("true class out of range for the prediction's label space");

    EvaluationRecord r;
    r.instance_id = pred.instance_id;
    const auto nearest = min_divergence_to_vertices(y, cp.vertices, cfg.divergence_kind, cfg.epsilon, cfg.log_base);
    r.d = nearest.distance;
    r.nearest_vertex_index = nearest.vertex_index;

    if (pred.encoding() == Encoding::point) {
        r.ns = 0.0;
    } else {
        switch (cfg.ns_kind) {
            case NsKind::dubois: r.ns = ns_dubois(*cp.mass, cfg.log_base); break;
            case NsKind::smets: r.ns = ns_smets(*cp.mass, cfg.log_base); break;
            case NsKind::korner: r.ns = ns_korner(*cp.mass); break;
            case NsKind::credal_uncertainty: r.ns = credal_uncertainty(*cp.intervals, cfg.log_base); break;
        }
    }
    r.e = r.d + cfg.lambda * r.ns;
    r.predicted_class = argmax(cp.summary);
    r.confidence = cp.summary[r.predicted_class];
    r.correct = r.predicted_class == y.true_class;
    r.credal_width = credal_width(cp.vertices, r.predicted_class);
    return r;
}

ModelSummary aggregate(std::span<const EvaluationRecord> records, std::string model_id, double lambda) {
    if (records.empty()) throw ContractViolation("cannot aggregate an empty record list");
    ModelSummary s;
    s.model_id = std::move(model_id);
    s.lambda = lambda;
    s.all = split_stats(records, 0);
    s.cc = split_stats(records, 1);
    s.icc = split_stats(records, 2);
    s.accuracy = static_cast<double>(s.cc.count) / static_cast<double>(records.size());
    std::vector<double> conf(records.size());
    auto ok = std::make_unique<bool[]>(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        conf[i] = records[i].confidence;
        ok[i] = records[i].correct;
    }
    s.ece = expected_calibration_error(conf, std::span<const bool>(ok.get(), records.size()));
    return s;
}

RankingTable rank_models(std::span<const ModelSummary> summaries, std::span<const double> lambdas) {
    RankingTable table;
    table.reserve(lambdas.size());
    for (double lambda : lambdas) {
        RankingRow row{lambda, {}};
        for (const auto& s : summaries) row.entries.push_back({s.model_id, s.all.d.mean + lambda * s.all.ns.mean});
        std::sort(row.entries.begin(), row.entries.end(), [](const RankEntry& a, const RankEntry& b) {
            if (a.e != b.e) return a.e < b.e;
            return a.model_id < b.model_id;
        });
        table.push_back(std::move(row));
    }
    return table;
}

std::vector<double> lambda_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start) || !(start >= 0.0))
        throw ContractViolation("lambda grid needs 0 <= start <= stop and step > 0");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

double expected_calibration_error(std::span<const double> confidences, std::span<const bool> correct, int bins) {
    if (confidences.size() != correct.size()) throw ContractViolation("confidence and correctness lists differ in length");
    if (confidences.empty()) return 0.0;
    std::vector<double> conf_sum(bins, 0.0), acc_sum(bins, 0.0);
    std::vector<std::size_t> count(bins, 0);
    for (std::size_t i = 0; i < confidences.size(); ++i) {
        const double c = confidences[i];
        if (!(c >= 0.0 && c <= 1.0)) throw ContractViolation("confidence outside [0,1]");
        // right-inclusive bins (k/B, (k+1)/B]
        const int b = std::clamp(static_cast<int>(std::ceil(c * bins)) - 1, 0, bins - 1);
        conf_sum[b] += c;
        acc_sum[b] += correct[i] ? 1.0 : 0.0;
        ++count[b];
    }
    const double total = static_cast<double>(confidences.size());
    double ece = 0.0;
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0) continue;
        const double n = static_cast<double>(count[b]);
        ece += (n / total) * std::abs(acc_sum[b] / n - conf_sum[b] / n);
    }
    return ece;
}

std::vector<InstanceOutcome> evaluate_batch_serial(std::span<const PredictionRecord> preds,
                                                   std::span<const int> labels, const EvalConfig& cfg) {
    std::vector<InstanceOutcome> out;
    out.reserve(preds.size());
    for (const auto& p : preds) out.push_back(evaluate_one(p, labels, cfg));
    return out;
}

std::vector<InstanceOutcome> evaluate_batch(std::span<const PredictionRecord> preds, std::span<const int> labels,
                                            const EvalConfig& cfg) {
    std::vector<InstanceOutcome> out(preds.size());
    const auto n = static_cast<std::int64_t>(preds.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = evaluate_one(preds[static_cast<std::size_t>(i)], labels, cfg);
    return out;
}

}  // namespace credeval
