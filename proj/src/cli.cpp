#include "credeval/cli.hpp"

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credeval/errors.hpp"
#include "credeval/evaluator.hpp"
#include "credeval/io.hpp"
#include "credeval/oracle.hpp"
#include "credeval/uncertainty.hpp"

namespace credeval {

namespace {

// Records are evaluated in chunks of this size so memory stays at one chunk of
// payloads plus the per-instance results.
constexpr std::size_t kChunk = 512;

struct EvalOptions {
    std::string manifest, labels, out_dir;
    double lambda = 1.0;
    std::string divergence = "kl", ns = "dubois", vertices = "approx";
    bool per_instance = false;
    double max_failures = 0.001;
    std::optional<int> budget;
};

const std::map<std::string, DivergenceKind> kDivergences{{"kl", DivergenceKind::kl}, {"js", DivergenceKind::js}};
const std::map<std::string, NsKind> kNsKinds{{"dubois", NsKind::dubois},
                                             {"smets", NsKind::smets},
                                             {"korner", NsKind::korner},
                                             {"cu", NsKind::credal_uncertainty}};
const std::map<std::string, VertexMode> kVertexModes{{"exact", VertexMode::exact}, {"approx", VertexMode::approximate}};

EvalConfig config_from(const EvalOptions& o) {
    EvalConfig cfg;
    cfg.lambda = o.lambda;
    cfg.divergence_kind = kDivergences.at(o.divergence);
    cfg.ns_kind = kNsKinds.at(o.ns);
    cfg.vertex_mode = kVertexModes.at(o.vertices);
    cfg.budget = o.budget;
    cfg.validate();
    return cfg;
}

struct ModelRun {
    ModelSummary summary;
    std::size_t attempted = 0;
};

// Streams one model's predictions, evaluates them and aggregates.
ModelRun run_model(const ModelManifest& mf, const std::vector<int>& labels, EvalConfig cfg,
                   std::vector<InstanceRow>* rows, std::ostream& err) {
    if (mf.budget) cfg.budget = mf.budget;
    PredictionReader reader(mf);
    std::vector<EvaluationRecord> records;
    std::size_t failures = 0, attempted = 0;
    int reported = 0;
    auto report = [&](const std::string& msg) {
        ++failures;
        if (reported++ < 5) err << "warning: model " << mf.model_id << ": " << msg << '\n';
    };

    std::vector<PredictionRecord> chunk;
    chunk.reserve(kChunk);
    auto flush = [&] {
        for (auto& outcome : evaluate_batch(chunk, labels, cfg)) {
            if (auto* r = std::get_if<EvaluationRecord>(&outcome)) {
                if (rows) rows->push_back({mf.model_id, *r});
                records.push_back(*r);
            } else {
                const auto& f = std::get<InstanceFailure>(outcome);
                report("instance " + std::to_string(f.instance_id) + ": " + f.message);
            }
        }
        chunk.clear();
    };

    while (auto next = reader.next()) {
        ++attempted;
        if (auto* rec = std::get_if<PredictionRecord>(&*next)) {
            chunk.push_back(std::move(*rec));
            if (chunk.size() == kChunk) flush();
        } else {
            const auto& e = std::get<RowError>(*next);
            report("line " + std::to_string(e.line) + ": " + e.message);
        }
    }
    flush();
    if (reported > 5) err << "warning: model " << mf.model_id << ": " << reported - 5 << " more failures\n";
    if (reader.warnings() > 0)
        err << "warning: model " << mf.model_id << ": " << reader.warnings()
            << " mass records have no singleton focal set\n";
    if (records.empty()) throw LoadError("model " + mf.model_id + ": no instance could be evaluated");

    ModelRun run;
    run.summary = aggregate(records, mf.model_id, cfg.lambda);
    run.summary.failures = failures;
    run.attempted = attempted;
    return run;
}

struct Evaluated {
    std::vector<ModelSummary> summaries;
    bool too_many_failures = false;
};

Evaluated evaluate_all(const EvalOptions& o, const EvalConfig& cfg, std::vector<InstanceRow>* rows,
                       std::ostream& err) {
    if (!(o.max_failures >= 0.0 && o.max_failures <= 1.0))
        throw ContractViolation("--max-failures must be a fraction in [0, 1]");
    const auto manifests = load_manifest(o.manifest);
    if (manifests.empty()) throw LoadError("manifest lists no models");
    const auto labels = load_labels(o.labels);
    if (labels.empty()) throw LoadError("labels file is empty");

    Evaluated out;
    for (const auto& mf : manifests) {
        auto run = run_model(mf, labels, cfg, rows, err);
        const double rate = static_cast<double>(run.summary.failures) / static_cast<double>(run.attempted);
        if (rate > o.max_failures) {
            out.too_many_failures = true;
            char buf[160];
            std::snprintf(buf, sizeof buf, "error: model %s: %zu of %zu instances failed (%.4g%% > %.4g%%)\n",
                          mf.model_id.c_str(), run.summary.failures, run.attempted, 100.0 * rate,
                          100.0 * o.max_failures);
            err << buf;
        }
        out.summaries.push_back(std::move(run.summary));
    }
    return out;
}

std::vector<double> parse_lambdas(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
        throw ContractViolation("--lambdas expects start:stop:step");
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ContractViolation("--lambdas: '" + s + "' is not a number");
        return v;
    };
    return lambda_grid(num(text.substr(0, a)), num(text.substr(a + 1, b - a - 1)), num(text.substr(b + 1)));
}

void print_summaries(const std::vector<ModelSummary>& summaries, std::ostream& out) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-20s %10s %10s %10s %9s %9s %8s\n", "model", "d", "NS", "E", "accuracy",
                  "ece", "failed");
    out << buf;
    for (const auto& s : summaries) {
        std::snprintf(buf, sizeof buf, "%-20s %10.6f %10.6f %10.6f %9.4f %9.4f %8zu\n", s.model_id.c_str(),
                      s.all.d.mean, s.all.ns.mean, s.all.e.mean, s.accuracy, s.ece, s.failures);
        out << buf;
    }
}

void print_vector(std::ostream& out, std::span<const double> p) {
    char buf[32];
    out << '(';
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", p[i]);
        out << buf;
    }
    out << ')';
}

int cmd_inspect(const std::string& manifest, const std::string& model, std::int64_t instance,
                const std::optional<std::string>& labels_path, const EvalOptions& o, std::ostream& out) {
    EvalConfig cfg = config_from(o);
    const auto manifests = load_manifest(manifest);
    const ModelManifest* mf = nullptr;
    for (const auto& m : manifests)
        if (m.model_id == model) mf = &m;
    if (!mf) throw LoadError("no model '" + model + "' in " + manifest);
    if (mf->budget) cfg.budget = mf->budget;

    PredictionReader reader(*mf);
    std::optional<PredictionRecord> found;
    while (auto next = reader.next()) {
        if (auto* e = std::get_if<RowError>(&*next)) {
            if (e->instance_id && *e->instance_id == instance)
                throw LoadError("instance " + std::to_string(instance) + ": " + e->message);
            continue;
        }
        auto& rec = std::get<PredictionRecord>(*next);
        if (rec.instance_id == instance) {
            found = std::move(rec);
            break;
        }
        if (rec.instance_id > instance) break;
    }
    if (!found) throw LoadError("model " + model + " has no instance " + std::to_string(instance));

    const auto cp = build_credal(*found, cfg);
    char buf[160];
    out << "model " << model << ", instance " << instance << ", encoding " << to_string(found->encoding())
        << ", N=" << found->num_classes() << '\n';
    out << "point summary ";
    print_vector(out, cp.summary);
    out << "\npredicted class " << predicted_class(*found) << '\n';

    if (cp.lower) {
        out << "lower probabilities (" << cp.lower->values().size() << " subsets)\n";
        for (const auto& [a, v] : cp.lower->values()) {
            std::snprintf(buf, sizeof buf, "  %-24s %.6g\n", a.to_string().c_str(), v);
            out << buf;
        }
    }
    if (cp.mass) {
        out << "masses (" << cp.mass->focal().size() << " focal sets)\n";
        for (const auto& f : cp.mass->focal()) {
            std::snprintf(buf, sizeof buf, "  %-24s %.6g\n", f.set.to_string().c_str(), f.mass);
            out << buf;
        }
    }
    out << "vertices (" << cp.vertices.size() << ", "
        << (cp.vertices.provenance() == VertexProvenance::native
                ? "native"
                : cp.vertices.provenance() == VertexProvenance::exact ? "exact" : "approx")
        << ")\n";
    for (std::size_t i = 0; i < cp.vertices.size(); ++i) {
        out << "  [" << i << "] ";
        print_vector(out, cp.vertices.vertices()[i]);
        out << '\n';
    }

    auto line = [&](const char* name, double v) {
        std::snprintf(buf, sizeof buf, "%-22s %.6f\n", name, v);
        out << buf;
    };
    out << "measures\n";
    if (cp.mass) {
        line("  ns_dubois", ns_dubois(*cp.mass, cfg.log_base));
        if (cp.mass->space().dense()) line("  ns_smets", ns_smets(*cp.mass, cfg.log_base));
        line("  ns_korner", ns_korner(*cp.mass));
        line("  spec_pal", spec_pal(*cp.mass));
    }
    if (cp.intervals) {
        const auto eb = entropy_bounds(*cp.intervals, cfg.log_base);
        line("  entropy_lower", eb.lower);
        line("  entropy_upper", eb.upper);
        line("  credal_uncertainty", eb.upper - eb.lower);
    }
    line("  entropy(summary)", shannon_entropy(cp.summary, cfg.log_base));
    if (const auto* s = std::get_if<SampleSet>(&found->payload)) line("  mutual_information", mutual_information(*s, cfg.log_base));

    if (labels_path) {
        const auto labels = load_labels(*labels_path);
        if (instance >= static_cast<std::int64_t>(labels.size()))
            throw LoadError("labels file has no line for instance " + std::to_string(instance));
        const auto r = evaluate_instance(*found, GroundTruth{labels[static_cast<std::size_t>(instance)]}, cfg);
        out << "evaluation (true class " << labels[static_cast<std::size_t>(instance)] << ", lambda " << cfg.lambda
            << ")\n";
        line("  d", r.d);
        line("  NS", r.ns);
        line("  E", r.e);
        out << "  nearest vertex         " << r.nearest_vertex_index << '\n';
        line("  credal_width", r.credal_width);
    }
    return kExitOk;
}

int cmd_oracle(int max_classes, std::ostream& out) {
    const auto report = oracle::self_test(max_classes);
    char buf[256];
    for (const auto& b : report.batches) {
        std::snprintf(buf, sizeof buf, "%s  %-46s %4d cases  max error %.3g\n", b.failures ? "FAIL" : "ok  ",
                      b.name.c_str(), b.cases, b.max_error);
        out << buf;
        if (b.failures) out << "      " << b.failures << " failed; first: " << b.first_failure << '\n';
    }
    std::snprintf(buf, sizeof buf, "%s in %.2f s\n", report.passed() ? "self-test passed" : "self-test FAILED",
                  report.seconds);
    out << buf;
    return report.passed() ? kExitOk : kExitValidation;
}

void add_eval_options(CLI::App* cmd, EvalOptions& o, bool with_vertices) {
    cmd->add_option("--manifest", o.manifest, "model manifest (JSON)")->required();
    cmd->add_option("--labels", o.labels, "labels file, one class index per line")->required();
    cmd->add_option("--divergence", o.divergence, "kl or js")->check(CLI::IsMember({"kl", "js"}));
    cmd->add_option("--ns", o.ns, "dubois, smets, korner or cu")
        ->check(CLI::IsMember({"dubois", "smets", "korner", "cu"}));
    if (with_vertices)
        cmd->add_option("--vertices", o.vertices, "exact or approx")->check(CLI::IsMember({"exact", "approx"}));
    cmd->add_option("--out", o.out_dir, "output directory")->required();
    cmd->add_option("--max-failures", o.max_failures, "tolerated fraction of failed instances per model");
    cmd->add_option("--budget", o.budget, "subset budget for sample/interval models");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evaluate uncertainty-aware classifiers through credal sets"};
    app.name("credeval");
    app.require_subcommand(1);

    EvalOptions eval_o;
    auto* evaluate = app.add_subcommand("evaluate", "evaluate every model at one lambda");
    add_eval_options(evaluate, eval_o, true);
    evaluate->add_option("--lambda", eval_o.lambda, "trade-off weight")->required();
    evaluate->add_flag("--per-instance", eval_o.per_instance, "also write per_instance.jsonl");

    EvalOptions rank_o;
    std::string lambdas;
    auto* rank = app.add_subcommand("rank", "rank models over a lambda grid");
    add_eval_options(rank, rank_o, true);
    rank->add_option("--lambdas", lambdas, "start:stop:step")->required();
    rank->add_option("--lambda", rank_o.lambda, "lambda for summary.jsonl (default 1)");

    EvalOptions inspect_o;
    std::string inspect_manifest, inspect_model;
    std::int64_t inspect_instance = 0;
    std::optional<std::string> inspect_labels;
    auto* inspect = app.add_subcommand("inspect", "show every intermediate quantity for one instance");
    inspect->add_option("--manifest", inspect_manifest, "model manifest (JSON)")->required();
    inspect->add_option("--model", inspect_model, "model id")->required();
    inspect->add_option("--instance", inspect_instance, "instance id")->required();
    inspect->add_option("--labels", inspect_labels, "labels file; adds d, NS and E");
    inspect->add_option("--lambda", inspect_o.lambda);
    inspect->add_option("--divergence", inspect_o.divergence)->check(CLI::IsMember({"kl", "js"}));
    inspect->add_option("--ns", inspect_o.ns)->check(CLI::IsMember({"dubois", "smets", "korner", "cu"}));
    inspect->add_option("--vertices", inspect_o.vertices)->check(CLI::IsMember({"exact", "approx"}));

    bool self_test = false;
    int max_classes = oracle::kMaxVertexClasses;
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force equivalence checks");
    oracle_cmd->add_flag("--self-test", self_test, "run the self-test suite")->required();
    oracle_cmd->add_option("--max-classes", max_classes, "largest label space to test (3-6)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (evaluate->parsed()) {
            const auto cfg = config_from(eval_o);
            std::vector<InstanceRow> rows;
            auto ev = evaluate_all(eval_o, cfg, eval_o.per_instance ? &rows : nullptr, err);
            const std::vector<double> grid{eval_o.lambda};
            write_results(ev.summaries, rank_models(ev.summaries, grid), eval_o.per_instance ? &rows : nullptr,
                          eval_o.out_dir, {cfg.divergence_kind, cfg.ns_kind});
            print_summaries(ev.summaries, out);
            return ev.too_many_failures ? kExitTooManyFailures : kExitOk;
        }
        if (rank->parsed()) {
            const auto grid = parse_lambdas(lambdas);
            const auto cfg = config_from(rank_o);
            auto ev = evaluate_all(rank_o, cfg, nullptr, err);
            const auto table = rank_models(ev.summaries, grid);
            write_results(ev.summaries, table, nullptr, rank_o.out_dir, {cfg.divergence_kind, cfg.ns_kind});
            char buf[64];
            for (const auto& row : table) {
                std::snprintf(buf, sizeof buf, "lambda %-6.3g", row.lambda);
                out << buf;
                for (const auto& e : row.entries) {
                    std::snprintf(buf, sizeof buf, "  %s %.3f", e.model_id.c_str(), e.e);
                    out << buf;
                }
                out << '\n';
            }
            return ev.too_many_failures ? kExitTooManyFailures : kExitOk;
        }
        if (inspect->parsed())
            return cmd_inspect(inspect_manifest, inspect_model, inspect_instance, inspect_labels, inspect_o, out);
        if (oracle_cmd->parsed()) return cmd_oracle(max_classes, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace credeval
