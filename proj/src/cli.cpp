#include "refbench/cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "refbench/corpus.hpp"
#include "refbench/report.hpp"
#include "refbench/synthcorpus.hpp"
#include "refbench/util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace refbench {

namespace {

GenParams gen_from_json(const json& p) {
    GenParams gen;
    gen.model_id = p.value("model", "");
    gen.temperature = p.value("temperature", 0.0);
    gen.top_p = p.value("top_p", 1.0);
    if (p.contains("max_output_tokens"))
        gen.max_output_tokens = p["max_output_tokens"].get<long>();
    if (gen.temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (gen.top_p <= 0.0 || gen.top_p > 1.0) throw ConfigError("top_p must be in (0,1]");
    return gen;
}

BackendProfile profile_from_json(const std::string& name, const json& p) {
    BackendProfile profile;
    profile.name = name;
    std::string kind = p.value("kind", "chat_llm");
    auto k = backend_kind_from_name(kind);
    if (!k) throw ConfigError("profile \"" + name + "\": unknown kind \"" + kind + "\"");
    profile.kind = *k;
    profile.endpoint = p.value("endpoint", "");
    profile.auth_env = p.value("auth_env", "");
    profile.gen = gen_from_json(p);
    profile.timeout_s = p.value("timeout_s", 120.0);
    profile.max_inflight = p.value("max_inflight", 4);
    profile.transport_retries = p.value("transport_retries", 3);
    profile.context_budget_tokens = p.value("context_budget_tokens", 128000L);
    std::string mode = p.value("mode", "live");
    if (mode == "live") profile.mode = BackendMode::live;
    else if (mode == "record") profile.mode = BackendMode::record;
    else if (mode == "replay") profile.mode = BackendMode::replay;
    else throw ConfigError("profile \"" + name + "\": unknown mode \"" + mode + "\"");
    profile.cache_dir = p.value("cache_dir", getenv_or("REFBENCH_CACHE_DIR"));
    return profile;
}

CliConfig config_from_json(const json& doc, std::string snapshot) {
    CliConfig cfg;
    cfg.snapshot = std::move(snapshot);
    if (doc.contains("profiles")) {
        for (const auto& [name, p] : doc["profiles"].items())
            cfg.profiles[name] = profile_from_json(name, p);
    }
    if (doc.contains("thresholds")) {
        const json& t = doc["thresholds"];
        cfg.thresholds.correct_min = t.value("correct_min", 0.95);
        cfg.thresholds.major_below = t.value("major_below", 0.60);
        cfg.sim.year_exact = t.value("year_exact", false);
        if (t.contains("binary_tp_threshold") && !t["binary_tp_threshold"].is_null())
            cfg.extraction.binary_tp_threshold = t["binary_tp_threshold"].get<double>();
    }
    if (doc.contains("strategy")) {
        const json& s = doc["strategy"];
        PipelineConfig& p = cfg.pipeline;
        p.dedupe_threshold = s.value("dedupe_threshold", p.dedupe_threshold);
        p.chunk_chars = s.value("chunk_chars", p.chunk_chars);
        p.chunk_overlap = s.value("chunk_overlap", p.chunk_overlap);
        p.select_mass = s.value("select_mass", p.select_mass);
        p.select_cap_fraction = s.value("select_cap_fraction", p.select_cap_fraction);
        p.chars_per_token = s.value("chars_per_token", p.chars_per_token);
        p.output_headroom_tokens = s.value("output_headroom_tokens", p.output_headroom_tokens);
        p.group_size = s.value("group_size", p.group_size);
        p.grobid_batch_size = s.value("grobid_batch_size", p.grobid_batch_size);
        p.two_step_per_page = s.value("two_step_per_page", p.two_step_per_page);
        p.page_break_pattern = s.value("page_break_pattern", p.page_break_pattern);
    }
    cfg.pipeline.concurrency = doc.value("concurrency", 1);
    cfg.embedding_profile = doc.value("embedding_profile", "");
    cfg.grobid_profile = doc.value("grobid_profile", "");
    return cfg;
}

json failure_to_json(const FailureEntry& f) {
    return {{"unit", f.unit},
            {"kind", failure_kind_name(f.failure.kind)},
            {"attempts", f.failure.attempts},
            {"detail", f.failure.detail},
            {"raw_output", f.failure.raw_output}};
}

StructuralFailure failure_from_json(const json& j) {
    StructuralFailure f;
    if (auto k = failure_kind_from_name(j.value("kind", ""))) f.kind = *k;
    f.attempts = j.value("attempts", 1);
    f.detail = j.value("detail", "");
    f.raw_output = j.value("raw_output", "");
    return f;
}

struct RunArgs {
    std::string task, strategy, backend, config, input, out, embedder;
};

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) {
    g_interrupted = 1;
}

// Installs SIGINT/SIGTERM handlers for the scope of one run so an
// interrupted run still flushes predictions and a partial-marked manifest.
struct SignalGuard {
    void (*old_int)(int);
    void (*old_term)(int);
    SignalGuard() {
        g_interrupted = 0;
        old_int = std::signal(SIGINT, on_signal);
        old_term = std::signal(SIGTERM, on_signal);
    }
    ~SignalGuard() {
        std::signal(SIGINT, old_int);
        std::signal(SIGTERM, old_term);
    }
};

struct ScoreArgs {
    std::string task, gold, pred, out, config, dataset, manifest;
    std::vector<std::string> breakdown_keys;
};

int do_run(const RunArgs& args) {
    auto task = task_from_name(args.task);
    if (!task) throw ConfigError("unknown task \"" + args.task + "\"");
    auto strategy = strategy_from_name(args.strategy);
    if (!strategy) throw ConfigError("unknown strategy \"" + args.strategy + "\"");

    CliConfig cfg = args.config.empty() ? default_cli_config() : load_cli_config(args.config);

    auto find_profile = [&](const std::string& name) -> BackendProfile {
        auto it = cfg.profiles.find(name);
        if (it == cfg.profiles.end())
            throw ConfigError("unknown backend profile \"" + name + "\"");
        return it->second;
    };

    std::unique_ptr<Backend> llm, embedder, grobid;
    if (*strategy == Strategy::grobid) {
        grobid = std::make_unique<Backend>(find_profile(
            args.backend.empty() ? cfg.grobid_profile : args.backend));
    } else {
        llm = std::make_unique<Backend>(find_profile(args.backend));
        if (*strategy == Strategy::semantic_preselect) {
            std::string name = args.embedder.empty() ? cfg.embedding_profile : args.embedder;
            if (name.empty())
                throw ConfigError("semantic strategy needs --embedder or embedding_profile");
            embedder = std::make_unique<Backend>(find_profile(name));
        }
    }

    Runner runner(*task, *strategy, cfg.pipeline, llm.get(), embedder.get(), grobid.get());
    runner.manifest().config_hash = sha256_hex(cfg.snapshot);
    SignalGuard signals;
    runner.set_cancel_check([]() { return g_interrupted != 0; });

    std::string predictions;
    if (*task == Task::parse) {
        LoaderOptions strict{true, nullptr};
        auto refs = load_reference_gold(args.input, strict);
        auto results = runner.run_references(refs);
        for (size_t i = 0; i < results.size(); ++i) {
            json line = {{"ref_id", refs[i].ref_id}};
            if (!refs[i].doc_id.empty()) line["doc_id"] = refs[i].doc_id;
            if (is_failure(results[i])) {
                line["prediction"] = nullptr;
                FailureEntry entry{refs[i].ref_id, "ref",
                                   std::get<StructuralFailure>(results[i])};
                line["failure"] = failure_to_json(entry);
            } else {
                line["prediction"] = json::parse(
                    record_to_json_text(std::get<ReferenceRecord>(results[i])));
            }
            predictions += line.dump() + "\n";
        }
    } else {
        LoaderOptions strict{true, nullptr};
        auto docs = load_document_gold(args.input, strict);
        for (const auto& doc : docs) {
            if (g_interrupted) {
                runner.manifest().partial = true;
                break;
            }
            DocOutput out = runner.run_document(doc);
            json line = {{"doc_id", doc.doc_id}};
            if (*task == Task::extract) {
                line["predictions"] = out.strings;
            } else {
                json records = json::array();
                for (const auto& rec : out.records)
                    records.push_back(json::parse(record_to_json_text(rec)));
                line["predictions"] = std::move(records);
            }
            json failures = json::array();
            for (const auto& f : out.failures) failures.push_back(failure_to_json(f));
            line["failures"] = std::move(failures);
            if (out.doc_failed) line["doc_failed"] = true;
            if (out.tokens_total > 0) {
                line["tokens_selected"] = out.tokens_selected;
                line["tokens_total"] = out.tokens_total;
            }
            predictions += line.dump() + "\n";
        }
    }
    runner.finish();
    atomic_write_file(args.out, predictions);
    atomic_write_file(args.out + ".manifest.json", runner.manifest().to_json_text());
    return kExitOk;
}

// ---- scoring ----

ReferenceRecord record_from_prediction_json(const json& j) {
    auto parsed = validate_record(j.dump());
    if (is_failure(parsed))
        throw FormatError("invalid record in predictions: " +
                              std::get<StructuralFailure>(parsed).detail,
                          0);
    return std::get<ReferenceRecord>(parsed);
}

std::map<std::string, json> load_predictions(const std::string& path, const char* id_key) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::map<std::string, json> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& ex) {
            throw FormatError(std::string("invalid prediction line: ") + ex.what(), line_no);
        }
        if (!obj.contains(id_key) || !obj[id_key].is_string())
            throw FormatError(std::string("prediction line missing \"") + id_key + "\"",
                              line_no);
        std::string id = obj[id_key].get<std::string>();
        if (!out.emplace(id, std::move(obj)).second)
            throw FormatError("duplicate prediction id \"" + id + "\"", line_no);
    }
    return out;
}

int do_score(const ScoreArgs& args) {
    auto task = task_from_name(args.task);
    if (!task) throw ConfigError("unknown task \"" + args.task + "\"");
    CliConfig cfg = args.config.empty() ? default_cli_config() : load_cli_config(args.config);

    MetricsReport report;
    report.dataset = args.dataset;
    report.task = task_name(*task);

    std::string manifest_path =
        args.manifest.empty() ? args.pred + ".manifest.json" : args.manifest;
    if (auto manifest_text = read_file_if_exists(manifest_path)) {
        report.manifest_hash = sha256_hex(*manifest_text);
        try {
            json m = json::parse(*manifest_text);
            report.runtime_seconds = m.value("total_seconds", 0.0);
            report.strategy = m.value("strategy", "");
            report.backend = m.value("backend", "");
        } catch (const json::parse_error&) {
            // hash still identifies the file; leave the labels empty
        }
    }

    std::vector<DocScore> doc_scores;
    size_t total_failures = 0;

    if (*task == Task::parse) {
        LoaderOptions strict{true, nullptr};
        auto refs = load_reference_gold(args.gold, strict);
        auto preds = load_predictions(args.pred, "ref_id");
        std::set<std::string> gold_ids;
        for (const auto& r : refs) gold_ids.insert(r.ref_id);
        for (const auto& [id, obj] : preds)
            if (!gold_ids.count(id))
                throw ConfigError("prediction ref_id \"" + id + "\" is not in the gold file");

        for (const auto& ref : refs) {
            DocScore doc;
            doc.doc_id = ref.ref_id;
            doc.language = ref.language;
            RecordScore score;
            bool structural = false;
            auto it = preds.find(ref.ref_id);
            if (it == preds.end()) {
                score = unmatched_gold_score(ref.record);
            } else {
                const json& obj = it->second;
                if (obj.contains("failure") && !obj["failure"].is_null()) {
                    structural = true;
                    ++doc.n_failures;
                    score = unmatched_gold_score(ref.record);
                } else if (obj.contains("prediction") && !obj["prediction"].is_null()) {
                    ReferenceRecord pred = record_from_prediction_json(obj["prediction"]);
                    score = score_record_pair(ref.record, pred, cfg.sim);
                    score.pred_index = 0;
                } else {
                    score = unmatched_gold_score(ref.record);
                }
            }
            doc.categories.push_back(classify_error(score, structural, cfg.thresholds));
            doc.record_scores.push_back(std::move(score));
            doc_scores.push_back(std::move(doc));
        }
    } else {
        LoaderOptions strict{true, nullptr};
        auto docs = load_document_gold(args.gold, strict);
        auto preds = load_predictions(args.pred, "doc_id");
        std::set<std::string> gold_ids;
        for (const auto& d : docs) gold_ids.insert(d.doc_id);
        for (const auto& [id, obj] : preds)
            if (!gold_ids.count(id))
                throw ConfigError("prediction doc_id \"" + id + "\" is not in the gold file");

        if (*task == Task::extract) {
            ExtractionScore pooled;
            double sim_sum = 0.0;
            struct GroupAcc {
                double tp = 0, sims = 0;
                size_t n_gold = 0, n_pred = 0, n_matched = 0, docs = 0;
            };
            std::map<std::string, std::map<std::string, GroupAcc>> group_acc;
            auto label_of = [&](const DocumentGold& d, const std::string& key) -> std::string {
                if (key == "language") return d.language.empty() ? "unknown" : d.language;
                if (key == "citation_class")
                    return d.citation_class ? "class_" + std::to_string(d.citation_class)
                                            : "unknown";
                if (key == "category") return d.category.empty() ? "unknown" : d.category;
                return "unknown";
            };
            for (const auto& doc : docs) {
                std::vector<std::string> predicted;
                size_t failures = 0;
                auto it = preds.find(doc.doc_id);
                if (it != preds.end()) {
                    for (const auto& s : it->second.value("predictions", json::array()))
                        predicted.push_back(s.get<std::string>());
                    failures = it->second.value("failures", json::array()).size();
                }
                ExtractionScore s =
                    score_extraction(doc.gold_strings, predicted, cfg.extraction);
                pooled.tp += s.tp;
                pooled.n_gold += s.n_gold;
                pooled.n_pred += s.n_pred;
                pooled.n_matched += s.n_matched;
                if (s.avg_sim) sim_sum += *s.avg_sim * static_cast<double>(s.n_matched);
                total_failures += failures;
                for (const auto& key : args.breakdown_keys) {
                    GroupAcc& acc = group_acc[key][label_of(doc, key)];
                    acc.tp += s.tp;
                    acc.sims += s.avg_sim ? *s.avg_sim * static_cast<double>(s.n_matched) : 0.0;
                    acc.n_gold += s.n_gold;
                    acc.n_pred += s.n_pred;
                    acc.n_matched += s.n_matched;
                    ++acc.docs;
                }
            }
            auto finish_extraction = [](double tp, size_t n_gold, size_t n_pred,
                                        size_t n_matched, double sims) {
                ExtractionScore s;
                s.tp = tp;
                s.n_gold = n_gold;
                s.n_pred = n_pred;
                s.n_matched = n_matched;
                if (n_gold == 0 && n_pred == 0) {
                    s.precision = s.recall = 1.0;
                } else {
                    s.precision = n_pred ? tp / static_cast<double>(n_pred) : 0.0;
                    s.recall = n_gold ? tp / static_cast<double>(n_gold) : 0.0;
                }
                s.f1 = f1_of(s.precision, s.recall);
                if (n_matched) s.avg_sim = sims / static_cast<double>(n_matched);
                return s;
            };
            report.extraction = finish_extraction(pooled.tp, pooled.n_gold, pooled.n_pred,
                                                  pooled.n_matched, sim_sum);
            for (const auto& [key, groups] : group_acc) {
                for (const auto& [label, acc] : groups) {
                    GroupReport g;
                    g.extraction = finish_extraction(acc.tp, acc.n_gold, acc.n_pred,
                                                     acc.n_matched, acc.sims);
                    g.n_documents = acc.docs;
                    report.breakdowns[key][label] = std::move(g);
                }
            }
        } else {
            for (const auto& doc : docs) {
                if (!doc.has_records)
                    throw ConfigError("document " + doc.doc_id +
                                      " has no gold records; e2e scoring needs them");
                std::vector<ReferenceRecord> predicted;
                bool doc_failed = false;
                size_t failures = 0;
                auto it = preds.find(doc.doc_id);
                if (it != preds.end()) {
                    doc_failed = it->second.value("doc_failed", false);
                    failures = it->second.value("failures", json::array()).size();
                    if (!doc_failed)
                        for (const auto& rec : it->second.value("predictions", json::array()))
                            predicted.push_back(record_from_prediction_json(rec));
                }
                EndToEndOptions opts;
                opts.sim = cfg.sim;
                opts.thresholds = cfg.thresholds;
                opts.structural_failure = doc_failed;
                DocScore score = score_endtoend(doc.gold_strings, doc.gold_records,
                                                predicted, opts);
                score.doc_id = doc.doc_id;
                score.language = doc.language;
                score.citation_class = doc.citation_class;
                score.category = doc.category;
                score.n_failures = failures;
                total_failures += failures;
                doc_scores.push_back(std::move(score));
            }
        }
    }

    if (*task != Task::extract) {
        report.metrics = pooled_metrics(doc_scores, cfg.thresholds);
        report.histogram = pooled_histogram(doc_scores);
        if (*task == Task::parse)
            for (const auto& d : doc_scores) total_failures += d.n_failures;
        for (const auto& key : args.breakdown_keys) {
            auto k = breakdown_key_from_name(key);
            if (!k) throw ConfigError("unknown breakdown key \"" + key + "\"");
            report.breakdowns[key] = breakdown(doc_scores, *k, cfg.thresholds);
        }
    }
    report.n_failures = total_failures;

    atomic_write_file(args.out, report_to_json_text(report));
    fs::path csv_path = fs::path(args.out).replace_extension(".csv");
    atomic_write_file(csv_path.string(), reports_to_csv({report}));
    return kExitOk;
}

int do_report(const std::vector<std::string>& inputs, const std::string& format,
              const std::string& out_path) {
    std::vector<MetricsReport> reports;
    for (const auto& path : inputs) {
        MetricsReport r = report_from_json_text(read_file(path));
        if (r.format_version != kReportFormatVersion)
            throw ConfigError("report " + path + " has format_version " +
                              std::to_string(r.format_version) + ", expected " +
                              std::to_string(kReportFormatVersion));
        reports.push_back(std::move(r));
    }
    std::string rendered;
    if (format == "csv") rendered = reports_to_csv(reports);
    else if (format == "md") rendered = reports_to_markdown(reports);
    else if (format == "json") rendered = reports_to_json(reports);
    else throw ConfigError("unknown format \"" + format + "\"");
    if (out_path.empty())
        std::cout << rendered;
    else
        atomic_write_file(out_path, rendered);
    return kExitOk;
}

int do_fixtures(const std::string& out_dir) {
    auto docs = make_synthetic_corpus();
    auto refs = make_synthetic_references();
    fs::create_directories(out_dir);
    atomic_write_file((fs::path(out_dir) / "corpus.jsonl").string(), corpus_to_jsonl(docs));
    atomic_write_file((fs::path(out_dir) / "references.jsonl").string(),
                      references_to_jsonl(refs));

    // Gold-faithful prediction files so scoring can be exercised offline.
    std::string extract_pred, e2e_pred, parse_pred;
    for (const auto& doc : docs) {
        json line = {{"doc_id", doc.doc_id},
                     {"predictions", doc.gold_strings},
                     {"failures", json::array()}};
        extract_pred += line.dump() + "\n";
        json records = json::array();
        for (const auto& rec : doc.gold_records)
            records.push_back(json::parse(record_to_json_text(rec)));
        json e2e_line = {{"doc_id", doc.doc_id},
                         {"predictions", std::move(records)},
                         {"failures", json::array()}};
        e2e_pred += e2e_line.dump() + "\n";
    }
    for (const auto& ref : refs) {
        json line = {{"ref_id", ref.ref_id},
                     {"doc_id", ref.doc_id},
                     {"prediction", json::parse(record_to_json_text(ref.record))}};
        parse_pred += line.dump() + "\n";
    }
    atomic_write_file((fs::path(out_dir) / "extract_pred.jsonl").string(), extract_pred);
    atomic_write_file((fs::path(out_dir) / "e2e_pred.jsonl").string(), e2e_pred);
    atomic_write_file((fs::path(out_dir) / "parse_pred.jsonl").string(), parse_pred);
    return kExitOk;
}

}  // namespace

CliConfig default_cli_config() {
    CliConfig cfg;
    cfg.snapshot = "{}";
    return cfg;
}

CliConfig load_cli_config(const std::string& path) {
    std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError("config " + path + ": " + ex.what());
    }
    try {
        return config_from_json(doc, doc.dump());
    } catch (const json::exception& ex) {
        throw ConfigError("config " + path + ": " + ex.what());
    }
}

int run_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("refbench");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_main(static_cast<int>(argv.size()), argv.data());
}

int run_main(int argc, const char* const* argv) {
    CLI::App app{"Schema-constrained benchmark harness for bibliographic reference "
                 "extraction and parsing"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Execute a task over a gold file");
    run->add_option("--task", run_args.task, "extract | parse | e2e")->required();
    run->add_option("--strategy", run_args.strategy,
                    "single | per-page | two-step | semantic | grobid")
        ->default_val("single");
    run->add_option("--backend", run_args.backend, "backend profile name")->required();
    run->add_option("--config", run_args.config, "config JSON file");
    run->add_option("--input", run_args.input, "gold JSONL input")->required();
    run->add_option("--out", run_args.out, "predictions JSONL output")->required();
    run->add_option("--embedder", run_args.embedder,
                    "embedding profile for the semantic strategy");

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Score predictions against gold");
    score->add_option("--task", score_args.task, "extract | parse | e2e")->required();
    score->add_option("--gold", score_args.gold, "gold JSONL file")->required();
    score->add_option("--pred", score_args.pred, "predictions JSONL file")->required();
    score->add_option("--out", score_args.out, "report JSON output")->required();
    score->add_option("--config", score_args.config, "config JSON file");
    score->add_option("--dataset", score_args.dataset, "dataset label for the report");
    score->add_option("--manifest", score_args.manifest,
                      "manifest path (default: <pred>.manifest.json)");
    score->add_option("--breakdown", score_args.breakdown_keys,
                      "breakdown keys: citation_class, language, category")
        ->delimiter(',');

    std::vector<std::string> report_inputs;
    std::string report_format = "md", report_out;
    auto* rep = app.add_subcommand("report", "Combine score reports into one table");
    rep->add_option("reports", report_inputs, "report JSON files")->required();
    rep->add_option("--format", report_format, "csv | md | json")->default_val("md");
    rep->add_option("--out", report_out, "output path (stdout when omitted)");

    std::string fixtures_out;
    auto* fix = app.add_subcommand("fixtures", "Write the bundled synthetic corpus");
    fix->add_option("--out", fixtures_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return do_run(run_args);
        if (score->parsed()) return do_score(score_args);
        if (rep->parsed()) return do_report(report_inputs, report_format, report_out);
        if (fix->parsed()) return do_fixtures(fixtures_out);
        return kExitConfig;
    } catch (const ConfigError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const AuthError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const ReplayMiss& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const FormatError& ex) {
        std::cerr << "error: " << ex.what() << " (line " << ex.line << ")\n";
        return kExitConfig;
    } catch (const IoError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitIo;
    }
}

}  // namespace refbench
