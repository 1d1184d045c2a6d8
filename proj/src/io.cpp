#include "credeval/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <system_error>

#include <json.hpp>

#include "credeval/errors.hpp"

namespace credeval {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string entry_name(std::size_t index, const json& entry) {
    std::string name = "models[" + std::to_string(index) + "]";
    if (entry.is_object() && entry.contains("id") && entry["id"].is_string())
        name += " (" + entry["id"].get<std::string>() + ")";
    return name;
}

int positive_int(const json& v, const std::string& where, const char* field) {
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw LoadError(where + ": field '" + field + "' must be a positive integer");
    return v.get<int>();
}

// Reads a JSON array of N finite numbers; returns an error message or empty.
std::string read_vector(const json& v, int n, const char* field, ProbabilityVector& out) {
    if (!v.is_array()) return std::string("'") + field + "' must be an array";
    if (static_cast<int>(v.size()) != n)
        return std::string("'") + field + "' has " + std::to_string(v.size()) + " entries, expected " +
               std::to_string(n);
    out.resize(n);
    for (int c = 0; c < n; ++c) {
        if (!v[c].is_number()) return std::string("'") + field + "' holds a non-number";
        out[c] = v[c].get<double>();
        if (!std::isfinite(out[c])) return std::string("'") + field + "' holds a non-finite value";
    }
    return {};
}

std::string check_distribution(const ProbabilityVector& p) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) return "negative probability";
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSampleSumTolerance) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "row sums to %.9g, not 1 (tolerance 1e-6)", sum);
        return buf;
    }
    return {};
}

std::ofstream open_out(const fs::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    return out;
}

std::ifstream open_in(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot read " + file.string());
    return in;
}

void put_split(ojson& row, const std::string& prefix, const SplitStats& s) {
    row[prefix + "count"] = s.count;
    row[prefix + "d_mean"] = round_sig6(s.d.mean);
    row[prefix + "d_std"] = round_sig6(s.d.std);
    row[prefix + "ns_mean"] = round_sig6(s.ns.mean);
    row[prefix + "ns_std"] = round_sig6(s.ns.std);
    row[prefix + "e_mean"] = round_sig6(s.e.mean);
    row[prefix + "e_std"] = round_sig6(s.e.std);
}

SplitStats get_split(const json& row, const std::string& prefix) {
    SplitStats s;
    s.count = row.at(prefix + "count").get<std::size_t>();
    s.d = {row.at(prefix + "d_mean").get<double>(), row.at(prefix + "d_std").get<double>()};
    s.ns = {row.at(prefix + "ns_mean").get<double>(), row.at(prefix + "ns_std").get<double>()};
    s.e = {row.at(prefix + "e_mean").get<double>(), row.at(prefix + "e_std").get<double>()};
    return s;
}

template <class F>
void for_each_json_line(const fs::path& file, F&& f) {
    auto in = open_in(file);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            f(json::parse(line));
        } catch (const json::exception& e) {
            throw LoadError(file.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
}

}  // namespace

std::vector<ModelManifest> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot read manifest " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("models") || !doc["models"].is_array())
        throw LoadError("manifest " + path.string() + " needs a top-level \"models\" array");

    const fs::path base = path.parent_path();
    std::vector<ModelManifest> out;
    for (std::size_t i = 0; i < doc["models"].size(); ++i) {
        const json& e = doc["models"][i];
        const std::string where = entry_name(i, e);
        if (!e.is_object()) throw LoadError(where + ": entry must be an object");
        for (const char* field : {"id", "encoding", "num_classes", "predictions"})
            if (!e.contains(field)) throw LoadError(where + ": missing field '" + field + "'");
        if (!e["id"].is_string() || e["id"].get<std::string>().empty())
            throw LoadError(where + ": field 'id' must be a nonempty string");
        if (!e["encoding"].is_string()) throw LoadError(where + ": field 'encoding' must be a string");
        const auto enc = parse_encoding(e["encoding"].get<std::string>());
        if (!enc) throw LoadError(where + ": unknown encoding '" + e["encoding"].get<std::string>() + "'");
        if (!e["predictions"].is_string()) throw LoadError(where + ": field 'predictions' must be a string");

        ModelManifest m;
        m.model_id = e["id"].get<std::string>();
        m.encoding = *enc;
        m.num_classes = positive_int(e["num_classes"], where, "num_classes");
        if (m.num_classes < 2 || m.num_classes > kMaxClasses)
            throw LoadError(where + ": num_classes must be in [2, 256]");
        if (m.encoding == Encoding::masses && m.num_classes > 64)
            throw LoadError(where + ": mass files store focal sets as 64-bit masks; num_classes must be <= 64");
        fs::path p = e["predictions"].get<std::string>();
        if (p.is_relative()) p = base / p;
        std::error_code ec;
        if (!fs::is_regular_file(p, ec)) throw LoadError(where + ": predictions file not readable: " + p.string());
        m.predictions_path = p;
        if (e.contains("budget")) m.budget = positive_int(e["budget"], where, "budget");
        if (e.contains("num_samples")) m.num_samples = positive_int(e["num_samples"], where, "num_samples");
        for (const auto& prev : out)
            if (prev.model_id == m.model_id) throw LoadError(where + ": duplicate model id");
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<int> load_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot read labels " + path.string());
    std::vector<int> labels;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            // trailing blank lines are tolerated, interior ones are not
            std::string rest;
            while (std::getline(in, rest))
                if (rest.find_first_not_of(" \t\r") != std::string::npos)
                    throw LoadError(path.string() + ":" + std::to_string(n) + ": blank line");
            break;
        }
        char* end = nullptr;
        const long v = std::strtol(line.c_str() + first, &end, 10);
        if (end == line.c_str() + first || std::string_view(end).find_first_not_of(" \t\r") != std::string::npos ||
            v < 0 || v >= kMaxClasses)
            throw LoadError(path.string() + ":" + std::to_string(n) + ": expected a class index, got '" + line + "'");
        labels.push_back(static_cast<int>(v));
    }
    return labels;
}

PredictionReader::PredictionReader(const ModelManifest& manifest)
    : manifest_(manifest), space_(manifest.num_classes), in_(manifest.predictions_path) {
    const std::string where = "model " + manifest_.model_id + ": " + manifest_.predictions_path.string();
    if (!in_) throw LoadError(where + ": cannot open");
    std::string line;
    if (!std::getline(in_, line)) throw LoadError(where + ": empty file, expected a header line");
    ++line_no_;
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw LoadError(where + ":1: header is not valid JSON: " + e.what());
    }
    if (!header.is_object() || !header.contains("encoding") || !header.contains("num_classes"))
        throw LoadError(where + ":1: header needs \"encoding\" and \"num_classes\"");
    if (header["encoding"] != std::string(to_string(manifest_.encoding)))
        throw LoadError(where + ":1: header encoding " + header["encoding"].dump() + " does not match manifest '" +
                        std::string(to_string(manifest_.encoding)) + "'");
    if (header["num_classes"] != manifest_.num_classes)
        throw LoadError(where + ":1: header num_classes " + header["num_classes"].dump() +
                        " does not match manifest " + std::to_string(manifest_.num_classes));
    if (manifest_.num_samples && header.contains("num_samples") && header["num_samples"] != *manifest_.num_samples)
        throw LoadError(where + ":1: header num_samples does not match manifest");
}

std::optional<ReadResult> PredictionReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        return parse_row(line);
    }
    return std::nullopt;
}

ReadResult PredictionReader::parse_row(const std::string& line) {
    const int n = manifest_.num_classes;
    std::optional<std::int64_t> id;
    auto fail = [&](std::string msg) -> ReadResult { return RowError{line_no_, id, std::move(msg)}; };

    json row;
    try {
        row = json::parse(line);
    } catch (const json::exception& e) {
        return fail(std::string("invalid JSON: ") + e.what());
    }
    if (!row.is_object() || !row.contains("id") || !row["id"].is_number_integer())
        return fail("record needs an integer \"id\"");
    id = row["id"].get<std::int64_t>();
    if (*id < 0) return fail("negative instance id");
    if (last_id_ && *id <= *last_id_) return fail("instance ids must be strictly ascending");
    last_id_ = id;

    try {
        switch (manifest_.encoding) {
        case Encoding::point: {
            if (!row.contains("p")) return fail("missing \"p\"");
            ProbabilityVector p;
            if (auto err = read_vector(row["p"], n, "p", p); !err.empty()) return fail(err);
            if (auto err = check_distribution(p); !err.empty()) return fail(err);
            return PredictionRecord{*id, PointPrediction{std::move(p)}};
        }
        case Encoding::samples: {
            if (!row.contains("samples") || !row["samples"].is_array() || row["samples"].empty())
                return fail("\"samples\" must be a nonempty array of rows");
            const auto& rows = row["samples"];
            if (manifest_.num_samples && static_cast<int>(rows.size()) != *manifest_.num_samples)
                return fail("expected " + std::to_string(*manifest_.num_samples) + " samples, got " +
                            std::to_string(rows.size()));
            std::vector<double> flat;
            flat.reserve(rows.size() * n);
            ProbabilityVector p;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (auto err = read_vector(rows[k], n, "samples[k]", p); !err.empty())
                    return fail("sample " + std::to_string(k) + ": " + err);
                if (auto err = check_distribution(p); !err.empty())
                    return fail("sample " + std::to_string(k) + ": " + err);
                flat.insert(flat.end(), p.begin(), p.end());
            }
            return PredictionRecord{*id, SampleSet(space_, std::move(flat))};
        }
        case Encoding::intervals: {
            if (!row.contains("lower") || !row.contains("upper")) return fail("missing \"lower\" or \"upper\"");
            ProbabilityVector lo, hi;
            if (auto err = read_vector(row["lower"], n, "lower", lo); !err.empty()) return fail(err);
            if (auto err = read_vector(row["upper"], n, "upper", hi); !err.empty()) return fail(err);
            for (int c = 0; c < n; ++c) {
                if (lo[c] < 0.0 || hi[c] > 1.0) return fail("bound outside [0, 1] for class " + std::to_string(c));
                if (lo[c] > hi[c]) return fail("lower > upper for class " + std::to_string(c));
            }
            return PredictionRecord{*id, IntervalPrediction(space_, std::move(lo), std::move(hi))};
        }
        case Encoding::masses: {
            if (!row.contains("focal") || !row["focal"].is_array() || row["focal"].empty())
                return fail("\"focal\" must be a nonempty array of [mask, mass] pairs");
            std::vector<FocalElement> focal;
            bool has_singleton = false;
            for (const auto& pair : row["focal"]) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number())
                    return fail("focal entries must be [nonnegative integer mask, mass]");
                const auto bits = pair[0].get<std::uint64_t>();
                const auto mask = SubsetMask::from_bits(bits);
                if (bits == 0) return fail("mass on the empty set");
                if (!space_.contains(mask))
                    return fail("mask " + std::to_string(bits) + " >= 2^" + std::to_string(n));
                const double mass = pair[1].get<double>();
                if (!std::isfinite(mass) || mass < 0.0) return fail("negative or non-finite mass");
                has_singleton = has_singleton || mask.count() == 1;
                focal.push_back({mask, mass});
            }
            if (!has_singleton) ++no_singleton_rows_;
            return PredictionRecord{*id, MassFunction(space_, std::move(focal), kSampleSumTolerance)};
        }
        }
    } catch (const Error& e) {
        return fail(e.what());
    }
    return fail("unhandled encoding");
}

std::vector<ReadResult> load_predictions(const ModelManifest& manifest) {
    PredictionReader reader(manifest);
    std::vector<ReadResult> out;
    while (auto r = reader.next()) out.push_back(std::move(*r));
    return out;
}

double round_sig6(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::strtod(buf, nullptr);
}

void write_summaries(const fs::path& file, const std::vector<ModelSummary>& summaries, const RunMetadata& meta) {
    auto out = open_out(file);
    for (const auto& s : summaries) {
        ojson row;
        row["model"] = s.model_id;
        row["lambda"] = round_sig6(s.lambda);
        row["divergence"] = std::string(to_string(meta.divergence));
        row["ns"] = std::string(to_string(meta.ns));
        put_split(row, "", s.all);
        put_split(row, "cc_", s.cc);
        put_split(row, "icc_", s.icc);
        row["accuracy"] = round_sig6(s.accuracy);
        row["ece"] = round_sig6(s.ece);
        row["failures"] = s.failures;
        out << row.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + file.string());
}

void write_rankings(const fs::path& file, const RankingTable& rankings) {
    auto out = open_out(file);
    for (const auto& r : rankings) {
        ojson row;
        row["lambda"] = round_sig6(r.lambda);
        ojson models = ojson::array(), es = ojson::array();
        for (const auto& e : r.entries) {
            models.push_back(e.model_id);
            es.push_back(round_sig6(e.e));
        }
        row["models"] = std::move(models);
        row["E"] = std::move(es);
        out << row.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + file.string());
}

void write_per_instance(const fs::path& file, const std::vector<InstanceRow>& rows) {
    auto out = open_out(file);
    for (const auto& r : rows) {
        ojson row;
        row["model"] = r.model_id;
        row["instance"] = r.record.instance_id;
        row["d"] = round_sig6(r.record.d);
        row["NS"] = round_sig6(r.record.ns);
        row["E"] = round_sig6(r.record.e);
        row["correct"] = r.record.correct;
        row["predicted_class"] = r.record.predicted_class;
        row["credal_width"] = round_sig6(r.record.credal_width);
        row["confidence"] = round_sig6(r.record.confidence);
        out << row.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + file.string());
}

void write_results(const std::vector<ModelSummary>& summaries, const RankingTable& rankings,
                   const std::vector<InstanceRow>* per_instance, const fs::path& out_dir, const RunMetadata& meta) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());
    write_summaries(out_dir / kSummaryFile, summaries, meta);
    write_rankings(out_dir / kRankingsFile, rankings);
    if (per_instance) write_per_instance(out_dir / kPerInstanceFile, *per_instance);
}

std::vector<ModelSummary> read_summaries(const fs::path& file) {
    std::vector<ModelSummary> out;
    for_each_json_line(file, [&](const json& row) {
        ModelSummary s;
        s.model_id = row.at("model").get<std::string>();
        s.lambda = row.at("lambda").get<double>();
        s.all = get_split(row, "");
        s.cc = get_split(row, "cc_");
        s.icc = get_split(row, "icc_");
        s.accuracy = row.at("accuracy").get<double>();
        s.ece = row.at("ece").get<double>();
        s.failures = row.at("failures").get<std::size_t>();
        out.push_back(std::move(s));
    });
    return out;
}

RankingTable read_rankings(const fs::path& file) {
    RankingTable out;
    for_each_json_line(file, [&](const json& row) {
        RankingRow r;
        r.lambda = row.at("lambda").get<double>();
        const auto& models = row.at("models");
        const auto& es = row.at("E");
        if (models.size() != es.size()) throw LoadError(file.string() + ": models and E differ in length");
        for (std::size_t i = 0; i < models.size(); ++i)
            r.entries.push_back({models[i].get<std::string>(), es[i].get<double>()});
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<InstanceRow> read_per_instance(const fs::path& file) {
    std::vector<InstanceRow> out;
    for_each_json_line(file, [&](const json& row) {
        InstanceRow r;
        r.model_id = row.at("model").get<std::string>();
        r.record.instance_id = row.at("instance").get<std::int64_t>();
        r.record.d = row.at("d").get<double>();
        r.record.ns = row.at("NS").get<double>();
        r.record.e = row.at("E").get<double>();
        r.record.correct = row.at("correct").get<bool>();
        r.record.predicted_class = row.at("predicted_class").get<int>();
        r.record.credal_width = row.at("credal_width").get<double>();
        r.record.confidence = row.at("confidence").get<double>();
        out.push_back(std::move(r));
    });
    return out;
}

}  // namespace credeval
