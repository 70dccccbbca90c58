#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "refbench/matching.hpp"
#include "refbench/schema.hpp"
#include "refbench/textnorm.hpp"

namespace refbench {

// Field-level outcome for one gold record. Unmatched gold records carry
// all their populated fields in fn_fields; `raw` is never scored.
struct RecordScore {
    size_t gold_index = 0;
    std::optional<size_t> pred_index;
    std::map<FieldId, double> per_field;  // fields present on both sides
    std::set<FieldId> fn_fields;          // gold only
    std::set<FieldId> fp_fields;          // prediction only
    bool matched = false;
};

enum class ErrorCategory { Correct, Minor, Major, Structural };

const char* error_category_name(ErrorCategory c);

struct ClassifyThresholds {
    double correct_min = 0.95;
    double major_below = 0.60;
};

struct FieldPRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double tp = 0.0;
    size_t pred_count = 0;
    size_t gold_count = 0;
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
    std::map<FieldId, FieldPRF> per_field;
    size_t n_records = 0;   // gold records scored
    size_t n_failures = 0;  // structural failures attached by the caller
};

RecordScore score_record_pair(const ReferenceRecord& gold, const ReferenceRecord& pred,
                              const FieldSimConfig& cfg = {});

// A gold record with no prediction: everything populated becomes a FN.
RecordScore unmatched_gold_score(const ReferenceRecord& gold);

// Micro pooling over records and fields. Unmatched predicted records add
// their populated fields to the precision denominator.
Metrics aggregate_micro(const std::vector<RecordScore>& scores,
                        const std::vector<ReferenceRecord>& unmatched_pred_records);

// Per-gold-record F1, averaged. Unmatched predictions do not participate.
double aggregate_macro(const std::vector<RecordScore>& scores);

FieldPRF per_field_metrics(const std::vector<RecordScore>& scores, FieldId field,
                           const std::vector<ReferenceRecord>& unmatched_pred_records = {});

// Collapses a record score into the error taxonomy. Fields present on only
// one side count as similarity 0, which lands the record in Major.
ErrorCategory classify_error(const RecordScore& score, bool structural,
                             const ClassifyThresholds& t = {});

struct CategoryHistogram {
    size_t correct = 0;
    size_t minor = 0;
    size_t major = 0;
    size_t structural = 0;

    size_t total() const { return correct + minor + major + structural; }
    double correct_share() const {
        return total() ? static_cast<double>(correct) / static_cast<double>(total()) : 0.0;
    }
    void add(ErrorCategory c);
};

// Everything scoring produced for one document; pooled across documents
// for corpus-level metrics and breakdowns.
struct DocScore {
    std::string doc_id;
    std::string language;
    int citation_class = 0;  // 0 = unknown
    std::string category;
    std::vector<RecordScore> record_scores;
    std::vector<ReferenceRecord> unmatched_pred_records;
    std::vector<ErrorCategory> categories;  // one per gold reference
    size_t n_failures = 0;
};

struct EndToEndOptions {
    FieldSimConfig sim;
    ClassifyThresholds thresholds;
    // The whole document's output failed validation: no predictions, and
    // every gold reference is a Structural error.
    bool structural_failure = false;
};

// Matches gold verbatim strings against canonical reconstructions of the
// predicted records, scores matched pairs field by field and classifies
// each gold reference.
DocScore score_endtoend(const std::vector<std::string>& gold_strings,
                        const std::vector<ReferenceRecord>& gold_records,
                        const std::vector<ReferenceRecord>& pred_records,
                        const EndToEndOptions& opts = {});

Metrics pooled_metrics(const std::vector<DocScore>& docs,
                       const ClassifyThresholds& t = {});
CategoryHistogram pooled_histogram(const std::vector<DocScore>& docs);

enum class BreakdownKey { citation_class, language, category };

std::optional<BreakdownKey> breakdown_key_from_name(const std::string& name);
const char* breakdown_key_name(BreakdownKey k);

struct GroupReport {
    Metrics metrics;
    CategoryHistogram histogram;
    std::optional<ExtractionScore> extraction;  // extraction-task groups
    size_t n_documents = 0;
};

// Pools the per-document record scores within each label group and
// recomputes metrics, rather than averaging document metrics.
std::map<std::string, GroupReport> breakdown(const std::vector<DocScore>& docs,
                                             BreakdownKey key,
                                             const ClassifyThresholds& t = {});

}  // namespace refbench
