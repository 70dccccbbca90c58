#include "refbench/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "refbench/matching.hpp"
#include "refbench/textnorm.hpp"
#include "refbench/util.hpp"

using nlohmann::json;

namespace refbench {

const char* task_name(Task t) {
    switch (t) {
        case Task::extract: return "extract";
        case Task::parse: return "parse";
        case Task::e2e: return "e2e";
    }
    return "unknown";
}

std::optional<Task> task_from_name(const std::string& name) {
    for (Task t : {Task::extract, Task::parse, Task::e2e})
        if (name == task_name(t)) return t;
    return std::nullopt;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::single_call: return "single_call";
        case Strategy::per_page: return "per_page";
        case Strategy::two_step: return "two_step";
        case Strategy::semantic_preselect: return "semantic_preselect";
        case Strategy::grobid: return "grobid";
    }
    return "unknown";
}

std::optional<Strategy> strategy_from_name(const std::string& name) {
    if (name == "single" || name == "single-call" || name == "single_call")
        return Strategy::single_call;
    if (name == "per-page" || name == "per_page") return Strategy::per_page;
    if (name == "two-step" || name == "two_step") return Strategy::two_step;
    if (name == "semantic" || name == "semantic_preselect")
        return Strategy::semantic_preselect;
    if (name == "grobid") return Strategy::grobid;
    return std::nullopt;
}

namespace {

long estimate_tokens(size_t chars, double chars_per_token) {
    return static_cast<long>(std::ceil(static_cast<double>(chars) /
                                       std::max(chars_per_token, 0.1)));
}

const char* task_instruction(Task task, ExpectedShape expect) {
    switch (task) {
        case Task::extract:
            return "Find every bibliographic reference in the document below, both in "
                   "bibliographies and in footnotes. Return ONLY a JSON array with the "
                   "verbatim reference strings in document order. No prose.";
        case Task::parse:
            return expect == ExpectedShape::record
                       ? "Convert the reference string below into one structured record "
                         "following the schema. Return ONLY the JSON object. No prose."
                       : "Convert each numbered reference string below into a structured "
                         "record following the schema. Return ONLY a JSON array with "
                         "exactly one record per input reference, in input order. No prose.";
        case Task::e2e:
            return "Extract every bibliographic reference from the document below, both "
                   "from bibliographies and from footnotes, and convert each into a "
                   "structured record following the schema. Return ONLY a JSON array of "
                   "records in document order. No prose.";
    }
    return "";
}

const char* few_shot_block(Task task, ExpectedShape expect) {
    static const char* extract_examples =
        "Example input:\n"
        "## References\n"
        "[1] Smith, J. (2011). Graph methods for citation data. Journal of Data, 4(2), "
        "pp. 10-22.\n"
        "[2] Rossi, M.: Storia della stampa. Einaudi, Torino 1987.\n"
        "Example output:\n"
        "[\"Smith, J. (2011). Graph methods for citation data. Journal of Data, 4(2), "
        "pp. 10-22.\", \"Rossi, M.: Storia della stampa. Einaudi, Torino 1987.\"]\n";
    static const char* parse_single_examples =
        "Example input:\n"
        "Smith, J. (2011). Graph methods for citation data. Journal of Data, 4(2), "
        "pp. 10-22.\n"
        "Example output:\n"
        "{\"authors\": [\"Smith, J.\"], \"full_title\": \"Graph methods for citation "
        "data\", \"container_title\": \"Journal of Data\", \"volume\": \"4\", \"issue\": "
        "\"2\", \"pages\": \"10-22\", \"year\": \"2011\"}\n"
        "Example input:\n"
        "Rossi, M.: Storia della stampa. Einaudi, Torino 1987.\n"
        "Example output:\n"
        "{\"authors\": [\"Rossi, M.\"], \"full_title\": \"Storia della stampa\", "
        "\"publisher\": \"Einaudi\", \"place\": \"Torino\", \"year\": \"1987\"}\n";
    static const char* record_list_examples =
        "Example input:\n"
        "1. Smith, J. (2011). Graph methods for citation data. Journal of Data, 4(2), "
        "pp. 10-22.\n"
        "2. Rossi, M.: Storia della stampa. Einaudi, Torino 1987.\n"
        "Example output:\n"
        "[{\"authors\": [\"Smith, J.\"], \"full_title\": \"Graph methods for citation "
        "data\", \"container_title\": \"Journal of Data\", \"volume\": \"4\", \"issue\": "
        "\"2\", \"pages\": \"10-22\", \"year\": \"2011\"}, {\"authors\": [\"Rossi, "
        "M.\"], \"full_title\": \"Storia della stampa\", \"publisher\": \"Einaudi\", "
        "\"place\": \"Torino\", \"year\": \"1987\"}]\n";
    if (task == Task::extract) return extract_examples;
    if (task == Task::parse && expect == ExpectedShape::record) return parse_single_examples;
    return record_list_examples;
}

}  // namespace

std::string build_prompt(Task task, const std::string& payload, ExpectedShape expect) {
    std::string prompt;
    prompt += task_instruction(task, expect);
    prompt += "\n\nEvery record uses this JSON schema; omit fields that are not present "
              "in the reference:\n";
    prompt += schema_json_document();
    prompt += "\n";
    prompt += few_shot_block(task, expect);
    prompt += kPayloadMarker;
    prompt += payload;
    return prompt;
}

std::string build_prompt_checked(Task task, const std::string& payload, ExpectedShape expect,
                                 const PipelineConfig& cfg, long context_budget_tokens) {
    std::string prompt = build_prompt(task, payload, expect);
    long needed = estimate_tokens(prompt.size(), cfg.chars_per_token) +
                  cfg.output_headroom_tokens;
    if (needed > context_budget_tokens)
        throw PayloadTooLarge("prompt needs ~" + std::to_string(needed) +
                              " tokens, budget is " + std::to_string(context_budget_tokens));
    return prompt;
}

namespace {

template <typename T>
Fallible<T> call_validated(Backend& backend, const std::string& prompt,
                           Fallible<T> (*validate)(const std::string&, ValidationLog*),
                           ValidationLog* log) {
    for (int attempt = 1; attempt <= 2; ++attempt) {
        auto raw = backend.complete(prompt);
        if (is_failure(raw)) {
            StructuralFailure f = std::get<StructuralFailure>(raw);
            f.attempts = attempt;
            return f;
        }
        auto parsed = validate(std::get<std::string>(raw), log);
        if (!is_failure(parsed)) return parsed;
        if (attempt == 2) {
            StructuralFailure f = std::get<StructuralFailure>(parsed);
            f.attempts = 2;
            return f;
        }
    }
    return StructuralFailure{};  // unreachable
}

// Order-preserving map with a bounded worker pool.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, int concurrency, Fn fn) {
    using Out = decltype(fn(items[0], size_t{0}));
    std::vector<Out> out(items.size());
    if (concurrency <= 1 || items.size() <= 1) {
        for (size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i], i);
        return out;
    }
    std::atomic<size_t> next{0};
    size_t workers = std::min<size_t>(concurrency, items.size());
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1))
                out[i] = fn(items[i], i);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace

Fallible<std::vector<std::string>> call_validated_string_list(Backend& backend,
                                                              const std::string& prompt,
                                                              ValidationLog* log) {
    return call_validated<std::vector<std::string>>(backend, prompt, validate_string_list,
                                                    log);
}

Fallible<ReferenceRecord> call_validated_record(Backend& backend, const std::string& prompt,
                                                ValidationLog* log) {
    return call_validated<ReferenceRecord>(backend, prompt, validate_record, log);
}

Fallible<std::vector<ReferenceRecord>> call_validated_record_list(Backend& backend,
                                                                  const std::string& prompt,
                                                                  ValidationLog* log) {
    return call_validated<std::vector<ReferenceRecord>>(backend, prompt,
                                                        validate_record_list, log);
}

std::vector<std::string> merge_page_outputs(
    const std::vector<std::vector<std::string>>& per_page, double threshold) {
    std::vector<std::vector<std::string>> kept(per_page.size());
    for (size_t p = 0; p < per_page.size(); ++p) {
        for (const std::string& s : per_page[p]) {
            bool dropped = false;
            if (p > 0) {
                for (std::string& t : kept[p - 1]) {
                    if (string_similarity(s, t) >= threshold) {
                        if (s.size() > t.size()) t = s;  // keep the longer variant
                        dropped = true;
                        break;
                    }
                }
            }
            if (!dropped) kept[p].push_back(s);
        }
    }
    std::vector<std::string> out;
    for (auto& page : kept)
        for (auto& s : page) out.push_back(std::move(s));
    return out;
}

std::vector<Chunk> chunk_document(const std::string& markdown, const PipelineConfig& cfg) {
    std::vector<Chunk> chunks;
    size_t offset = 0;
    for (const Page& page : page_split(markdown, cfg.page_break_pattern)) {
        const std::string& text = page.text;
        if (normalize_text(text).empty()) {
            offset += text.size() + 1;
            continue;
        }
        if (text.size() <= cfg.chunk_chars) {
            Chunk c;
            c.text = text;
            c.char_offset = offset;
            c.page_index = page.index;
            chunks.push_back(std::move(c));
        } else {
            size_t step = cfg.chunk_chars > cfg.chunk_overlap
                              ? cfg.chunk_chars - cfg.chunk_overlap
                              : cfg.chunk_chars;
            for (size_t start = 0; start < text.size(); start += step) {
                size_t end = std::min(start + cfg.chunk_chars, text.size());
                Chunk c;
                c.text = text.substr(start, end - start);
                c.char_offset = offset + start;
                c.page_index = page.index;
                chunks.push_back(std::move(c));
                if (end == text.size()) break;
            }
        }
        offset += text.size() + 1;
    }
    return chunks;
}

std::string RunManifest::to_json_text() const {
    json failures_json = json::array();
    for (const auto& f : failures) {
        failures_json.push_back({{"doc_id", f.doc_id},
                                 {"unit", f.unit},
                                 {"kind", failure_kind_name(f.failure.kind)},
                                 {"attempts", f.failure.attempts},
                                 {"detail", f.failure.detail},
                                 {"raw_output", f.failure.raw_output}});
    }
    json tokens = json::object();
    for (const auto& [doc, pair] : doc_tokens)
        tokens[doc] = {{"selected", pair.first}, {"total", pair.second}};
    json gen_json = {{"model_id", gen.model_id},
                     {"temperature", gen.temperature},
                     {"top_p", gen.top_p}};
    if (gen.max_output_tokens) gen_json["max_output_tokens"] = *gen.max_output_tokens;
    json obj = {{"task", task_name(task)},
                {"strategy", strategy_name(strategy)},
                {"backend", backend},
                {"gen", gen_json},
                {"started", started},
                {"finished", finished},
                {"doc_seconds", doc_seconds},
                {"failures", failures_json},
                {"n_failures", failures.size()},
                {"prompt_template_version", prompt_template_version},
                {"config_hash", config_hash},
                {"doc_tokens", tokens},
                {"total_seconds", total_seconds},
                {"warnings", warnings},
                {"partial", partial}};
    return obj.dump(2) + "\n";
}

Runner::Runner(Task task, Strategy strategy, PipelineConfig cfg, Backend* llm,
               Backend* embedder, Backend* grobid)
    : task_(task), strategy_(strategy), cfg_(std::move(cfg)), llm_(llm),
      embedder_(embedder), grobid_(grobid) {
    manifest_.task = task_;
    manifest_.strategy = strategy_;
    manifest_.started = iso_utc_now();
    if (strategy_ == Strategy::grobid) {
        if (!grobid_) throw ConfigError("grobid strategy needs a grobid profile");
        manifest_.backend = grobid_->profile().name;
    } else {
        if (!llm_) throw ConfigError("LLM strategies need a chat backend");
        manifest_.backend = llm_->profile().name;
        manifest_.gen = llm_->profile().gen;
    }
    if (strategy_ == Strategy::semantic_preselect && !embedder_)
        throw ConfigError("semantic pre-selection needs an embedding profile");
    if (task_ == Task::extract && strategy_ == Strategy::two_step)
        throw ConfigError("two-step applies to end-to-end parsing only");
    if (task_ == Task::e2e && strategy_ == Strategy::per_page)
        throw ConfigError("per-page segmentation applies to extraction only");
    if (task_ == Task::parse && strategy_ != Strategy::single_call &&
        strategy_ != Strategy::grobid)
        throw ConfigError("parsing runs single-call or grobid");
    if (cfg_.group_size < 1) throw ConfigError("group_size must be >= 1");
}

void Runner::record_failure(const std::string& doc_id, const std::string& unit,
                            StructuralFailure failure) {
    std::lock_guard lock(mu_);
    manifest_.failures.push_back({doc_id, unit, std::move(failure)});
}

void Runner::record_warnings(const std::string& doc_id, const ValidationLog& log) {
    if (log.warnings.empty()) return;
    std::lock_guard lock(mu_);
    for (const auto& w : log.warnings) {
        if (manifest_.warnings.size() >= 200) return;
        manifest_.warnings.push_back(doc_id + ": " + w);
    }
}

DocOutput Runner::run_single_call(const DocumentGold& doc, const std::string& payload,
                                  const std::string& unit, Task task) {
    DocOutput out;
    std::string prompt;
    try {
        ExpectedShape expect = task == Task::extract ? ExpectedShape::string_list
                                                     : ExpectedShape::record_list;
        prompt = build_prompt_checked(task, payload, expect, cfg_,
                                      llm_->profile().context_budget_tokens);
    } catch (const PayloadTooLarge& ex) {
        StructuralFailure f;
        f.kind = FailureKind::transport_error;
        f.detail = std::string("payload_too_large: ") + ex.what();
        record_failure(doc.doc_id, unit, f);
        out.failures.push_back({doc.doc_id, unit, std::move(f)});
        out.doc_failed = true;
        return out;
    }
    ValidationLog log;
    if (task == Task::extract) {
        auto result = call_validated_string_list(*llm_, prompt, &log);
        if (is_failure(result)) {
            auto f = std::get<StructuralFailure>(result);
            record_failure(doc.doc_id, unit, f);
            out.failures.push_back({doc.doc_id, unit, std::move(f)});
            out.doc_failed = true;
        } else {
            out.strings = std::get<std::vector<std::string>>(result);
        }
    } else {
        auto result = call_validated_record_list(*llm_, prompt, &log);
        if (is_failure(result)) {
            auto f = std::get<StructuralFailure>(result);
            record_failure(doc.doc_id, unit, f);
            out.failures.push_back({doc.doc_id, unit, std::move(f)});
            out.doc_failed = true;
        } else {
            out.records = std::get<std::vector<ReferenceRecord>>(result);
        }
    }
    record_warnings(doc.doc_id, log);
    return out;
}

DocOutput Runner::run_extract_single(const DocumentGold& doc) {
    return run_single_call(doc, doc.markdown, "doc", Task::extract);
}

DocOutput Runner::run_extract_per_page(const DocumentGold& doc) {
    DocOutput out;
    std::vector<Page> pages = page_split(doc.markdown, cfg_.page_break_pattern);

    auto page_result = parallel_map(pages, cfg_.concurrency,
                                    [&](const Page& page, size_t) -> Fallible<std::vector<std::string>> {
        if (normalize_text(page.text).empty()) return std::vector<std::string>{};
        std::string prompt = build_prompt_checked(Task::extract, page.text,
                                                  ExpectedShape::string_list, cfg_,
                                                  llm_->profile().context_budget_tokens);
        return call_validated_string_list(*llm_, prompt);
    });

    std::vector<std::vector<std::string>> per_page(pages.size());
    size_t failed_pages = 0;
    for (size_t p = 0; p < pages.size(); ++p) {
        if (is_failure(page_result[p])) {
            auto f = std::get<StructuralFailure>(page_result[p]);
            std::string unit = "page:" + std::to_string(pages[p].index);
            record_failure(doc.doc_id, unit, f);
            out.failures.push_back({doc.doc_id, unit, std::move(f)});
            ++failed_pages;
        } else {
            per_page[p] = std::get<std::vector<std::string>>(page_result[p]);
        }
    }
    out.strings = merge_page_outputs(per_page, cfg_.dedupe_threshold);
    out.doc_failed = !pages.empty() && failed_pages == pages.size();
    return out;
}

DocOutput Runner::run_e2e_single(const DocumentGold& doc) {
    return run_single_call(doc, doc.markdown, "doc", Task::e2e);
}

std::vector<Fallible<ReferenceRecord>> Runner::run_parse(
    const std::vector<std::string>& raws, const std::vector<std::string>& ids,
    std::vector<FailureEntry>* failures) {
    std::vector<Fallible<ReferenceRecord>> out(raws.size(), StructuralFailure{});
    if (raws.empty()) return out;

    struct Group {
        size_t first = 0;
        size_t count = 0;
        size_t index = 0;
    };
    std::vector<Group> groups;
    for (size_t start = 0; start < raws.size(); start += cfg_.group_size)
        groups.push_back({start, std::min<size_t>(cfg_.group_size, raws.size() - start),
                          groups.size() + 1});

    auto group_result = parallel_map(groups, cfg_.concurrency,
                                     [&](const Group& g, size_t) -> Fallible<std::vector<ReferenceRecord>> {
        long budget = llm_->profile().context_budget_tokens;
        if (g.count == 1) {
            std::string prompt = build_prompt_checked(Task::parse, raws[g.first],
                                                      ExpectedShape::record, cfg_, budget);
            ValidationLog log;
            auto one = call_validated_record(*llm_, prompt, &log);
            record_warnings(ids[g.first], log);
            if (is_failure(one)) return std::get<StructuralFailure>(one);
            return std::vector<ReferenceRecord>{std::get<ReferenceRecord>(one)};
        }
        std::string payload;
        for (size_t k = 0; k < g.count; ++k)
            payload += std::to_string(k + 1) + ". " + raws[g.first + k] + "\n";
        std::string prompt = build_prompt_checked(Task::parse, payload,
                                                  ExpectedShape::record_list, cfg_, budget);
        ValidationLog log;
        auto many = call_validated_record_list(*llm_, prompt, &log);
        record_warnings(ids[g.first], log);
        if (is_failure(many)) return std::get<StructuralFailure>(many);
        auto records = std::get<std::vector<ReferenceRecord>>(many);
        if (records.size() != g.count) {
            StructuralFailure f;
            f.kind = FailureKind::schema_violation;
            f.attempts = 2;
            f.detail = "group returned " + std::to_string(records.size()) +
                       " records for " + std::to_string(g.count) + " inputs";
            return f;
        }
        return records;
    });

    for (size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& g = groups[gi];
        if (is_failure(group_result[gi])) {
            const auto& f = std::get<StructuralFailure>(group_result[gi]);
            std::string unit = "group:" + std::to_string(g.index);
            for (size_t k = 0; k < g.count; ++k) {
                out[g.first + k] = f;
                record_failure(ids[g.first + k], unit, f);
                if (failures) failures->push_back({ids[g.first + k], unit, f});
            }
        } else {
            const auto& records = std::get<std::vector<ReferenceRecord>>(group_result[gi]);
            for (size_t k = 0; k < g.count; ++k) out[g.first + k] = records[k];
        }
    }
    return out;
}

DocOutput Runner::run_e2e_two_step(const DocumentGold& doc) {
    DocOutput out;
    DocOutput extracted = cfg_.two_step_per_page ? run_extract_per_page(doc)
                                                 : run_extract_single(doc);
    out.failures = extracted.failures;
    if (extracted.doc_failed) {
        out.doc_failed = true;
        return out;
    }
    std::vector<std::string> ids(extracted.strings.size(), doc.doc_id);
    auto parsed = run_parse(extracted.strings, ids, &out.failures);
    for (auto& item : parsed) {
        if (is_failure(item)) continue;  // failure stays local to its group
        out.records.push_back(std::move(std::get<ReferenceRecord>(item)));
    }
    return out;
}

DocOutput Runner::run_semantic_preselect(const DocumentGold& doc) {
    DocOutput out;
    std::vector<Chunk> chunks = chunk_document(doc.markdown, cfg_);
    if (chunks.empty()) return out;

    long total_chars = 0;
    for (const auto& c : chunks) total_chars += static_cast<long>(c.text.size());

    std::vector<size_t> selected;
    if (chunks.size() == 1) {
        selected.push_back(0);
    } else {
        std::vector<std::string> texts;
        for (const auto& c : chunks) texts.push_back(c.text);
        auto chunk_vecs = embedder_->embed(texts, "");
        auto query_vec = embedder_->embed({kRetrievalInstruction}, kRetrievalInstruction);
        if (is_failure(chunk_vecs) || is_failure(query_vec)) {
            StructuralFailure f = is_failure(chunk_vecs)
                                      ? std::get<StructuralFailure>(chunk_vecs)
                                      : std::get<StructuralFailure>(query_vec);
            record_failure(doc.doc_id, "doc", f);
            out.failures.push_back({doc.doc_id, "doc", std::move(f)});
            out.doc_failed = true;
            return out;
        }
        const auto& vecs = std::get<std::vector<std::vector<double>>>(chunk_vecs);
        const auto& query = std::get<std::vector<std::vector<double>>>(query_vec)[0];

        std::vector<double> scores(chunks.size(), 0.0);
        double mass_total = 0.0;
        for (size_t i = 0; i < chunks.size(); ++i) {
            double dot = 0.0;
            for (size_t d = 0; d < std::min(query.size(), vecs[i].size()); ++d)
                dot += query[d] * vecs[i][d];
            scores[i] = (dot + 1.0) / 2.0;  // cosine mapped to [0,1]
            chunks[i].retrieval_score = scores[i];
            mass_total += scores[i];
        }

        std::vector<size_t> order(chunks.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        });

        size_t cap = std::max<size_t>(
            1, static_cast<size_t>(cfg_.select_cap_fraction *
                                   static_cast<double>(chunks.size())));
        double accumulated = 0.0;
        for (size_t rank = 0; rank < order.size(); ++rank) {
            selected.push_back(order[rank]);
            accumulated += scores[order[rank]];
            if (selected.size() >= cap) break;
            if (mass_total > 0.0 && accumulated / mass_total >= cfg_.select_mass) break;
        }
        std::sort(selected.begin(), selected.end());
    }

    std::string payload;
    long selected_chars = 0;
    for (size_t idx : selected) {
        if (!payload.empty()) payload += "\n";
        payload += chunks[idx].text;
        selected_chars += static_cast<long>(chunks[idx].text.size());
    }

    out.tokens_selected = estimate_tokens(selected_chars, cfg_.chars_per_token);
    out.tokens_total = estimate_tokens(total_chars, cfg_.chars_per_token);
    {
        std::lock_guard lock(mu_);
        manifest_.doc_tokens[doc.doc_id] = {out.tokens_selected, out.tokens_total};
    }

    DocOutput call = run_single_call(doc, payload, "doc", task_);
    call.tokens_selected = out.tokens_selected;
    call.tokens_total = out.tokens_total;
    call.failures.insert(call.failures.begin(), out.failures.begin(), out.failures.end());
    return call;
}

DocOutput Runner::run_grobid_document(const DocumentGold& doc) {
    if (doc.pdf_path.empty())
        throw ConfigError("document " + doc.doc_id + " has no pdf_path for grobid e2e");
    DocOutput out;
    std::string pdf = read_file(doc.pdf_path);
    auto tei = grobid_->grobid_process_fulltext(pdf);
    if (is_failure(tei)) {
        auto f = std::get<StructuralFailure>(tei);
        record_failure(doc.doc_id, "doc", f);
        out.failures.push_back({doc.doc_id, "doc", std::move(f)});
        out.doc_failed = true;
        return out;
    }
    try {
        for (auto& entry : import_tei(std::get<std::string>(tei))) {
            if (record_is_empty(entry.record)) continue;
            entry.record.raw = entry.raw;
            out.records.push_back(std::move(entry.record));
        }
    } catch (const XmlError& ex) {
        StructuralFailure f;
        f.kind = FailureKind::malformed_json;
        f.detail = ex.what();
        f.raw_output = std::get<std::string>(tei);
        record_failure(doc.doc_id, "doc", f);
        out.failures.push_back({doc.doc_id, "doc", std::move(f)});
        out.doc_failed = true;
    }
    return out;
}

DocOutput Runner::run_document(const DocumentGold& doc) {
    auto start = std::chrono::steady_clock::now();
    DocOutput out;
    if (strategy_ == Strategy::grobid) {
        out = run_grobid_document(doc);
    } else if (task_ == Task::extract) {
        switch (strategy_) {
            case Strategy::single_call: out = run_extract_single(doc); break;
            case Strategy::per_page: out = run_extract_per_page(doc); break;
            case Strategy::semantic_preselect: out = run_semantic_preselect(doc); break;
            default: throw ConfigError("unsupported extract strategy");
        }
    } else if (task_ == Task::e2e) {
        switch (strategy_) {
            case Strategy::single_call: out = run_e2e_single(doc); break;
            case Strategy::two_step: out = run_e2e_two_step(doc); break;
            case Strategy::semantic_preselect: out = run_semantic_preselect(doc); break;
            default: throw ConfigError("unsupported e2e strategy");
        }
    } else {
        throw ConfigError("parse task runs on reference files, not documents");
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                         .count();
    std::lock_guard lock(mu_);
    manifest_.doc_seconds[doc.doc_id] = seconds;
    return out;
}

std::vector<Fallible<ReferenceRecord>> Runner::run_references(
    const std::vector<ReferenceGold>& refs) {
    auto start = std::chrono::steady_clock::now();
    std::vector<Fallible<ReferenceRecord>> out;

    if (strategy_ == Strategy::grobid) {
        out.assign(refs.size(), StructuralFailure{});
        // Batched citation calls; a bad response only fails its own batch.
        for (size_t start = 0; start < refs.size(); start += cfg_.grobid_batch_size) {
            if (cancel_requested()) {
                std::lock_guard lock(mu_);
                manifest_.partial = true;
                out.resize(start);
                break;
            }
            size_t count = std::min<size_t>(cfg_.grobid_batch_size, refs.size() - start);
            std::vector<std::string> raws;
            for (size_t k = 0; k < count; ++k) raws.push_back(refs[start + k].raw);
            auto tei = grobid_->grobid_parse_citations(raws);

            auto fail_batch = [&](StructuralFailure f) {
                for (size_t k = 0; k < count; ++k) {
                    record_failure(refs[start + k].ref_id, "ref", f);
                    out[start + k] = f;
                }
            };
            if (is_failure(tei)) {
                fail_batch(std::get<StructuralFailure>(tei));
                continue;
            }
            std::vector<TeiEntry> entries;
            try {
                entries = import_tei(std::get<std::string>(tei));
            } catch (const XmlError& ex) {
                StructuralFailure f;
                f.kind = FailureKind::malformed_json;
                f.detail = ex.what();
                f.raw_output = std::get<std::string>(tei);
                fail_batch(std::move(f));
                continue;
            }
            if (entries.size() != count) {
                StructuralFailure f;
                f.kind = FailureKind::schema_violation;
                f.detail = "GROBID returned " + std::to_string(entries.size()) +
                           " records for " + std::to_string(count) + " citations";
                fail_batch(std::move(f));
                continue;
            }
            for (size_t k = 0; k < count; ++k) {
                if (record_is_empty(entries[k].record)) {
                    StructuralFailure f;
                    f.kind = FailureKind::schema_violation;
                    f.detail = "empty GROBID record";
                    f.raw_output = entries[k].raw;
                    record_failure(refs[start + k].ref_id, "ref", f);
                    out[start + k] = std::move(f);
                } else {
                    out[start + k] = entries[k].record;
                }
            }
        }
    } else {
        size_t slice = std::max<size_t>(1, static_cast<size_t>(cfg_.group_size)) *
                       std::max<size_t>(1, static_cast<size_t>(cfg_.concurrency));
        out.clear();
        for (size_t start = 0; start < refs.size(); start += slice) {
            if (cancel_requested()) {
                std::lock_guard lock(mu_);
                manifest_.partial = true;
                break;
            }
            size_t count = std::min(slice, refs.size() - start);
            std::vector<std::string> raws, ids;
            for (size_t k = 0; k < count; ++k) {
                raws.push_back(refs[start + k].raw);
                ids.push_back(refs[start + k].ref_id);
            }
            auto part = run_parse(raws, ids, nullptr);
            for (auto& item : part) out.push_back(std::move(item));
        }
    }

    std::lock_guard lock(mu_);
    manifest_.doc_seconds["<references>"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

void Runner::finish() {
    manifest_.finished = iso_utc_now();
    double total = 0.0;
    for (const auto& [doc, s] : manifest_.doc_seconds) total += s;
    manifest_.total_seconds = total;
}

}  // namespace refbench
