#include "refbench/fieldscore.hpp"

#include <algorithm>

namespace refbench {

const char* error_category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Correct: return "correct";
        case ErrorCategory::Minor: return "minor";
        case ErrorCategory::Major: return "major";
        case ErrorCategory::Structural: return "structural";
    }
    return "unknown";
}

void CategoryHistogram::add(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Correct: ++correct; break;
        case ErrorCategory::Minor: ++minor; break;
        case ErrorCategory::Major: ++major; break;
        case ErrorCategory::Structural: ++structural; break;
    }
}

RecordScore score_record_pair(const ReferenceRecord& gold, const ReferenceRecord& pred,
                              const FieldSimConfig& cfg) {
    RecordScore s;
    s.matched = true;
    for (FieldId f : kAllFields) {
        bool in_gold = field_present(gold, f);
        bool in_pred = field_present(pred, f);
        if (in_gold && in_pred)
            s.per_field[f] = field_similarity(f, gold, pred, cfg);
        else if (in_gold)
            s.fn_fields.insert(f);
        else if (in_pred)
            s.fp_fields.insert(f);
    }
    return s;
}

RecordScore unmatched_gold_score(const ReferenceRecord& gold) {
    RecordScore s;
    s.matched = false;
    for (FieldId f : kAllFields)
        if (field_present(gold, f)) s.fn_fields.insert(f);
    return s;
}

namespace {

struct Pooled {
    double tp = 0.0;
    size_t pred_count = 0;
    size_t gold_count = 0;
};

Pooled pool(const std::vector<RecordScore>& scores,
            const std::vector<ReferenceRecord>& unmatched_pred_records) {
    Pooled p;
    for (const auto& s : scores) {
        for (const auto& [f, sim] : s.per_field) p.tp += sim;
        p.pred_count += s.per_field.size() + s.fp_fields.size();
        p.gold_count += s.per_field.size() + s.fn_fields.size();
    }
    for (const auto& r : unmatched_pred_records)
        p.pred_count += static_cast<size_t>(populated_field_count(r));
    return p;
}

void fill_prf(const Pooled& p, double& precision, double& recall, double& f1) {
    if (p.pred_count == 0 && p.gold_count == 0) {
        precision = recall = f1 = 1.0;
        return;
    }
    precision = p.pred_count ? p.tp / static_cast<double>(p.pred_count) : 0.0;
    recall = p.gold_count ? p.tp / static_cast<double>(p.gold_count) : 0.0;
    f1 = f1_of(precision, recall);
}

}  // namespace

Metrics aggregate_micro(const std::vector<RecordScore>& scores,
                        const std::vector<ReferenceRecord>& unmatched_pred_records) {
    Metrics m;
    m.n_records = scores.size();
    Pooled p = pool(scores, unmatched_pred_records);
    fill_prf(p, m.precision, m.recall, m.micro_f1);
    m.macro_f1 = aggregate_macro(scores);
    for (FieldId f : kAllFields) {
        FieldPRF prf = per_field_metrics(scores, f, unmatched_pred_records);
        if (prf.pred_count || prf.gold_count) m.per_field[f] = prf;
    }
    return m;
}

double aggregate_macro(const std::vector<RecordScore>& scores) {
    if (scores.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& s : scores) {
        Pooled p = pool({s}, {});
        double precision, recall, f1;
        fill_prf(p, precision, recall, f1);
        sum += f1;
    }
    return sum / static_cast<double>(scores.size());
}

FieldPRF per_field_metrics(const std::vector<RecordScore>& scores, FieldId field,
                           const std::vector<ReferenceRecord>& unmatched_pred_records) {
    FieldPRF out;
    for (const auto& s : scores) {
        auto it = s.per_field.find(field);
        if (it != s.per_field.end()) {
            out.tp += it->second;
            ++out.pred_count;
            ++out.gold_count;
        }
        if (s.fn_fields.count(field)) ++out.gold_count;
        if (s.fp_fields.count(field)) ++out.pred_count;
    }
    for (const auto& r : unmatched_pred_records)
        if (field_present(r, field)) ++out.pred_count;
    out.precision = out.pred_count ? out.tp / static_cast<double>(out.pred_count) : 0.0;
    out.recall = out.gold_count ? out.tp / static_cast<double>(out.gold_count) : 0.0;
    out.f1 = f1_of(out.precision, out.recall);
    return out;
}

ErrorCategory classify_error(const RecordScore& score, bool structural,
                             const ClassifyThresholds& t) {
    if (structural) return ErrorCategory::Structural;
    double worst = 1.0;
    for (const auto& [f, sim] : score.per_field) worst = std::min(worst, sim);
    if (!score.fn_fields.empty() || !score.fp_fields.empty()) worst = 0.0;
    if (worst < t.major_below) return ErrorCategory::Major;
    if (worst < t.correct_min) return ErrorCategory::Minor;
    return ErrorCategory::Correct;
}

DocScore score_endtoend(const std::vector<std::string>& gold_strings,
                        const std::vector<ReferenceRecord>& gold_records,
                        const std::vector<ReferenceRecord>& pred_records,
                        const EndToEndOptions& opts) {
    DocScore doc;
    if (opts.structural_failure) {
        for (size_t i = 0; i < gold_records.size(); ++i) {
            RecordScore s = unmatched_gold_score(gold_records[i]);
            s.gold_index = i;
            doc.record_scores.push_back(std::move(s));
            doc.categories.push_back(ErrorCategory::Structural);
        }
        doc.n_failures = 1;
        return doc;
    }

    std::vector<std::string> canon(pred_records.size());
    for (size_t j = 0; j < pred_records.size(); ++j)
        canon[j] = canonical_string(pred_records[j]);

    Pairing pairing = optimal_assignment(similarity_matrix(gold_strings, canon));

    std::vector<std::optional<size_t>> gold_to_pred(gold_records.size());
    for (const auto& p : pairing.pairs) gold_to_pred[p.gold_index] = p.pred_index;

    for (size_t i = 0; i < gold_records.size(); ++i) {
        RecordScore s;
        if (gold_to_pred[i]) {
            s = score_record_pair(gold_records[i], pred_records[*gold_to_pred[i]], opts.sim);
            s.pred_index = gold_to_pred[i];
        } else {
            s = unmatched_gold_score(gold_records[i]);
        }
        s.gold_index = i;
        doc.categories.push_back(classify_error(s, false, opts.thresholds));
        doc.record_scores.push_back(std::move(s));
    }
    for (size_t j : pairing.unmatched_pred)
        doc.unmatched_pred_records.push_back(pred_records[j]);
    return doc;
}

Metrics pooled_metrics(const std::vector<DocScore>& docs, const ClassifyThresholds&) {
    std::vector<RecordScore> scores;
    std::vector<ReferenceRecord> unmatched;
    size_t failures = 0;
    for (const auto& d : docs) {
        scores.insert(scores.end(), d.record_scores.begin(), d.record_scores.end());
        unmatched.insert(unmatched.end(), d.unmatched_pred_records.begin(),
                         d.unmatched_pred_records.end());
        failures += d.n_failures;
    }
    Metrics m = aggregate_micro(scores, unmatched);
    m.n_failures = failures;
    return m;
}

CategoryHistogram pooled_histogram(const std::vector<DocScore>& docs) {
    CategoryHistogram h;
    for (const auto& d : docs)
        for (ErrorCategory c : d.categories) h.add(c);
    return h;
}

std::optional<BreakdownKey> breakdown_key_from_name(const std::string& name) {
    if (name == "citation_class") return BreakdownKey::citation_class;
    if (name == "language") return BreakdownKey::language;
    if (name == "category") return BreakdownKey::category;
    return std::nullopt;
}

const char* breakdown_key_name(BreakdownKey k) {
    switch (k) {
        case BreakdownKey::citation_class: return "citation_class";
        case BreakdownKey::language: return "language";
        case BreakdownKey::category: return "category";
    }
    return "unknown";
}

std::map<std::string, GroupReport> breakdown(const std::vector<DocScore>& docs,
                                             BreakdownKey key,
                                             const ClassifyThresholds& t) {
    auto label_of = [&](const DocScore& d) -> std::string {
        switch (key) {
            case BreakdownKey::citation_class:
                return d.citation_class > 0 ? "class_" + std::to_string(d.citation_class)
                                            : "unknown";
            case BreakdownKey::language:
                return d.language.empty() ? "unknown" : d.language;
            case BreakdownKey::category:
                return d.category.empty() ? "unknown" : d.category;
        }
        return "unknown";
    };

    std::map<std::string, std::vector<DocScore>> groups;
    for (const auto& d : docs) groups[label_of(d)].push_back(d);

    std::map<std::string, GroupReport> out;
    for (auto& [label, group] : groups) {
        GroupReport rep;
        rep.metrics = pooled_metrics(group, t);
        rep.histogram = pooled_histogram(group);
        rep.n_documents = group.size();
        out[label] = std::move(rep);
    }
    return out;
}

}  // namespace refbench
