#pragma once

#include <map>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refbench/backends.hpp"
#include "refbench/corpus.hpp"
#include "refbench/schema.hpp"

namespace refbench {

enum class Task { extract, parse, e2e };
enum class Strategy { single_call, per_page, two_step, semantic_preselect, grobid };

const char* task_name(Task t);
std::optional<Task> task_from_name(const std::string& name);
const char* strategy_name(Strategy s);
// Accepts the CLI spellings (single, per-page, two-step, semantic, grobid).
std::optional<Strategy> strategy_from_name(const std::string& name);

struct PayloadTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kPromptTemplateVersion = "v1";
inline constexpr const char* kPayloadMarker = "\nInput:\n";
inline constexpr const char* kRetrievalInstruction =
    "identify bibliographic reference sections";

struct PipelineConfig {
    double dedupe_threshold = 0.9;     // page-boundary near-duplicate removal
    size_t chunk_chars = 2000;         // fallback window when a page is too long
    size_t chunk_overlap = 200;
    double select_mass = 0.5;          // score mass the selection must cover
    double select_cap_fraction = 0.25; // ceiling on selected chunks
    double chars_per_token = 4.0;
    long output_headroom_tokens = 4096;
    int group_size = 1;                // references per parse call
    size_t grobid_batch_size = 64;     // citations per processCitationList call
    bool two_step_per_page = true;     // extraction stage of the two-step pipeline
    int concurrency = 1;               // parallel page/group calls per document
    std::string page_break_pattern = kDefaultPageBreakPattern;
};

enum class ExpectedShape { record, record_list, string_list };

// Deterministic template instantiation: instructions, the schema block,
// the bundled few-shot examples, then the payload after kPayloadMarker.
// Throws PayloadTooLarge when the prompt exceeds the backend's context
// budget after reserving output headroom.
std::string build_prompt(Task task, const std::string& payload,
                         ExpectedShape expect = ExpectedShape::record_list);
std::string build_prompt_checked(Task task, const std::string& payload,
                                 ExpectedShape expect, const PipelineConfig& cfg,
                                 long context_budget_tokens);

// A structural failure attributed to one unit of work.
struct FailureEntry {
    std::string doc_id;
    std::string unit;  // "doc", "page:N", "group:N", "ref"
    StructuralFailure failure;
};

struct RunManifest {
    Task task = Task::extract;
    Strategy strategy = Strategy::single_call;
    std::string backend;
    GenParams gen;
    std::string started;
    std::string finished;
    std::map<std::string, double> doc_seconds;
    std::vector<FailureEntry> failures;
    std::string prompt_template_version = kPromptTemplateVersion;
    std::string config_hash;
    // tokens_selected / tokens_total per document (semantic pre-selection).
    std::map<std::string, std::pair<long, long>> doc_tokens;
    double total_seconds = 0.0;
    std::vector<std::string> warnings;  // validation notes (capped)
    bool partial = false;               // run interrupted; results incomplete

    std::string to_json_text() const;
};

struct Chunk {
    std::string text;
    size_t char_offset = 0;
    std::optional<int> page_index;
    std::optional<double> retrieval_score;
};

// Output of one document-level task run.
struct DocOutput {
    std::vector<std::string> strings;         // extract
    std::vector<ReferenceRecord> records;     // e2e
    std::vector<FailureEntry> failures;
    bool doc_failed = false;  // the whole document produced no valid output
    long tokens_selected = 0;
    long tokens_total = 0;
};

// Validates one backend response, retrying exactly once with identical
// settings on invalid output. Transport errors are not retried here (the
// backend already applies its own bounded transport retry).
Fallible<std::vector<std::string>> call_validated_string_list(Backend& backend,
                                                              const std::string& prompt,
                                                              ValidationLog* log = nullptr);
Fallible<ReferenceRecord> call_validated_record(Backend& backend, const std::string& prompt,
                                                ValidationLog* log = nullptr);
Fallible<std::vector<ReferenceRecord>> call_validated_record_list(Backend& backend,
                                                                  const std::string& prompt,
                                                                  ValidationLog* log = nullptr);

// Concatenates per-page outputs in page order, removing strings that are
// near-duplicates (>= threshold) of an adjacent page's kept strings; the
// longer variant of a duplicate pair survives.
std::vector<std::string> merge_page_outputs(
    const std::vector<std::vector<std::string>>& per_page, double threshold = 0.9);

std::vector<Chunk> chunk_document(const std::string& markdown, const PipelineConfig& cfg);

// Executes one task x strategy over documents or reference strings and
// accumulates timing and failure accounting into the manifest.
class Runner {
public:
    Runner(Task task, Strategy strategy, PipelineConfig cfg, Backend* llm,
           Backend* embedder = nullptr, Backend* grobid = nullptr);

    DocOutput run_document(const DocumentGold& doc);
    std::vector<Fallible<ReferenceRecord>> run_references(const std::vector<ReferenceGold>& refs);
    // Parses raw strings in groups of group_size; ids label the failure
    // entries (one id per raw).
    std::vector<Fallible<ReferenceRecord>> run_parse(const std::vector<std::string>& raws,
                                                     const std::vector<std::string>& ids,
                                                     std::vector<FailureEntry>* failures);

    DocOutput run_extract_single(const DocumentGold& doc);
    DocOutput run_extract_per_page(const DocumentGold& doc);
    DocOutput run_e2e_single(const DocumentGold& doc);
    DocOutput run_e2e_two_step(const DocumentGold& doc);
    DocOutput run_semantic_preselect(const DocumentGold& doc);
    DocOutput run_grobid_document(const DocumentGold& doc);

    void finish();
    RunManifest& manifest() { return manifest_; }
    const PipelineConfig& config() const { return cfg_; }

    // Polled between documents / reference batches; a true return stops
    // the run and marks the manifest partial.
    void set_cancel_check(std::function<bool()> check) { cancel_check_ = std::move(check); }

private:
    DocOutput run_single_call(const DocumentGold& doc, const std::string& payload,
                              const std::string& unit, Task task);
    void record_failure(const std::string& doc_id, const std::string& unit,
                        StructuralFailure failure);
    void record_warnings(const std::string& doc_id, const ValidationLog& log);

    bool cancel_requested() const { return cancel_check_ && cancel_check_(); }

    Task task_;
    Strategy strategy_;
    PipelineConfig cfg_;
    Backend* llm_;
    Backend* embedder_;
    Backend* grobid_;
    RunManifest manifest_;
    std::function<bool()> cancel_check_;
    std::mutex mu_;
};

}  // namespace refbench
