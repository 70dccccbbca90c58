#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "refbench/fieldscore.hpp"
#include "support/oracles.hpp"

using namespace refbench;

namespace {

RecordScore matched_score(std::map<FieldId, double> per_field,
                          std::set<FieldId> fn = {}, std::set<FieldId> fp = {}) {
    RecordScore s;
    s.matched = true;
    s.pred_index = 0;
    s.per_field = std::move(per_field);
    s.fn_fields = std::move(fn);
    s.fp_fields = std::move(fp);
    return s;
}

std::vector<RecordScore> random_scores(std::mt19937& rng, size_t n) {
    std::uniform_real_distribution<double> sim(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 3);
    std::vector<RecordScore> out;
    for (size_t i = 0; i < n; ++i) {
        RecordScore s;
        s.gold_index = i;
        s.matched = coin(rng) != 0;
        for (FieldId f : kAllFields) {
            int c = coin(rng);
            if (!s.matched) {
                if (c != 0) s.fn_fields.insert(f);
                continue;
            }
            if (c == 0) s.per_field[f] = sim(rng);
            else if (c == 1) s.fn_fields.insert(f);
            else if (c == 2) s.fp_fields.insert(f);
        }
        if (s.matched && s.per_field.empty()) s.per_field[FieldId::full_title] = sim(rng);
        if (!s.matched && s.fn_fields.empty()) s.fn_fields.insert(FieldId::full_title);
        out.push_back(std::move(s));
    }
    return out;
}

ReferenceRecord sample_record() {
    ReferenceRecord r;
    r.authors = {"Whitfield, A."};
    r.full_title = "Urban Archives in Early Modern Europe";
    r.container_title = "Journal of Historical Geography";
    r.year = "1931";
    r.pages = "10-27";
    return r;
}

}  // namespace

TEST_CASE("score_record_pair") {
    SUBCASE("identical records score 1.0 everywhere") {
        ReferenceRecord r = sample_record();
        RecordScore s = score_record_pair(r, r);
        CHECK(s.per_field.size() == 5);
        for (const auto& [f, sim] : s.per_field) CHECK(sim == 1.0);
        CHECK(s.fn_fields.empty());
        CHECK(s.fp_fields.empty());
    }
    SUBCASE("gold-only fields are false negatives") {
        ReferenceRecord g, p;
        g.full_title = "X";
        g.year = "2020";
        p.full_title = "X";
        RecordScore s = score_record_pair(g, p);
        CHECK(s.per_field == std::map<FieldId, double>{{FieldId::full_title, 1.0}});
        CHECK(s.fn_fields == std::set<FieldId>{FieldId::year});
    }
    SUBCASE("prediction-only fields are false positives") {
        ReferenceRecord g, p;
        g.full_title = "Data";
        p.full_title = "Date";
        p.doi = "10.1/z";
        RecordScore s = score_record_pair(g, p);
        CHECK(oracles::lev("data", "date") == 1);
        CHECK(s.per_field[FieldId::full_title] == doctest::Approx(0.75));
        CHECK(s.fp_fields == std::set<FieldId>{FieldId::doi});
    }
    SUBCASE("raw is never scored") {
        ReferenceRecord g, p;
        g.full_title = "X";
        g.raw = "gold raw";
        p.full_title = "X";
        p.raw = "completely different";
        RecordScore s = score_record_pair(g, p);
        CHECK(s.per_field.size() == 1);
        CHECK(s.fn_fields.empty());
        CHECK(s.fp_fields.empty());
    }
}

TEST_CASE("aggregate_micro worked example reproduces to 1e-9") {
    std::vector<RecordScore> scores = {
        matched_score({{FieldId::full_title, 1.0}, {FieldId::year, 1.0}}),
        matched_score({{FieldId::full_title, 0.8}}, {FieldId::year}),
    };
    Metrics m = aggregate_micro(scores, {});
    CHECK(m.precision == doctest::Approx(2.8 / 3.0).epsilon(1e-9));
    CHECK(m.recall == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(m.micro_f1 == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("all-structural corpus yields zero TP") {
    ReferenceRecord g = sample_record();
    std::vector<RecordScore> scores = {unmatched_gold_score(g), unmatched_gold_score(g)};
    Metrics m = aggregate_micro(scores, {});
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.micro_f1 == 0.0);
}

TEST_CASE("one perfect record gives all ones") {
    Metrics m = aggregate_micro({matched_score({{FieldId::full_title, 1.0},
                                                {FieldId::year, 1.0},
                                                {FieldId::pages, 1.0}})},
                                {});
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.micro_f1 == 1.0);
    CHECK(m.macro_f1 == 1.0);
}

TEST_CASE("aggregate_macro worked example") {
    std::vector<RecordScore> scores = {
        matched_score({{FieldId::full_title, 1.0}, {FieldId::year, 1.0}}),
        matched_score({{FieldId::full_title, 0.8}}, {FieldId::year}),
    };
    // rec2: P = 0.8, R = 0.4, F1 = 8/15; macro = (1 + 8/15) / 2.
    double rec2_f1 = 2.0 * 0.8 * 0.4 / 1.2;
    CHECK(aggregate_macro(scores) ==
          doctest::Approx((1.0 + rec2_f1) / 2.0).epsilon(1e-9));
    CHECK(aggregate_macro(scores) == doctest::Approx(0.7666666667).epsilon(1e-6));
}

TEST_CASE("unmatched gold record contributes zero to macro") {
    std::vector<RecordScore> scores = {
        matched_score({{FieldId::full_title, 1.0}}),
        unmatched_gold_score(sample_record()),
    };
    CHECK(aggregate_macro(scores) == doctest::Approx(0.5));
}

TEST_CASE("per_field_metrics") {
    SUBCASE("exact everywhere") {
        auto scores = std::vector<RecordScore>{
            matched_score({{FieldId::year, 1.0}}),
            matched_score({{FieldId::year, 1.0}}),
        };
        FieldPRF prf = per_field_metrics(scores, FieldId::year);
        CHECK(prf.precision == 1.0);
        CHECK(prf.recall == 1.0);
        CHECK(prf.f1 == 1.0);
    }
    SUBCASE("never predicted") {
        auto scores = std::vector<RecordScore>{
            matched_score({{FieldId::full_title, 1.0}}, {FieldId::year}),
            matched_score({{FieldId::full_title, 1.0}}, {FieldId::year}),
            matched_score({{FieldId::full_title, 1.0}}, {FieldId::year}),
        };
        FieldPRF prf = per_field_metrics(scores, FieldId::year);
        CHECK(prf.precision == 0.0);
        CHECK(prf.recall == 0.0);
        CHECK(prf.f1 == 0.0);
        CHECK(prf.gold_count == 3);
    }
    SUBCASE("worked example") {
        auto scores = std::vector<RecordScore>{
            matched_score({{FieldId::full_title, 1.0}}),
            matched_score({{FieldId::full_title, 0.5}}),
            matched_score({}, {FieldId::full_title}),
        };
        scores[2].per_field[FieldId::year] = 1.0;  // keep the third record non-degenerate
        FieldPRF prf = per_field_metrics(scores, FieldId::full_title);
        CHECK(prf.precision == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(prf.recall == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(prf.f1 == doctest::Approx(0.6).epsilon(1e-9));
    }
}

TEST_CASE("micro aggregation equals the from-scratch oracle on random scores") {
    std::mt19937 rng(101);
    for (int i = 0; i < 100; ++i) {
        auto scores = random_scores(rng, 1 + i % 7);
        std::vector<ReferenceRecord> unmatched;
        if (i % 3 == 0) unmatched.push_back(sample_record());
        Metrics m = aggregate_micro(scores, unmatched);
        auto oracle = oracles::pooled_micro(scores, unmatched);
        CHECK(m.precision == doctest::Approx(oracle.precision).epsilon(1e-12));
        CHECK(m.recall == doctest::Approx(oracle.recall).epsilon(1e-12));
        CHECK(m.micro_f1 == doctest::Approx(oracle.f1).epsilon(1e-12));
    }
}

TEST_CASE("classify_error threshold boundaries are exact") {
    auto with_sims = [](std::initializer_list<double> sims) {
        std::map<FieldId, double> per_field;
        int i = 0;
        for (double s : sims) per_field[kAllFields[i++]] = s;
        return matched_score(per_field);
    };
    CHECK(classify_error(with_sims({0.95, 1.0}), false) == ErrorCategory::Correct);
    CHECK(classify_error(with_sims({0.9499, 1.0}), false) == ErrorCategory::Minor);
    CHECK(classify_error(with_sims({0.60, 1.0}), false) == ErrorCategory::Minor);
    CHECK(classify_error(with_sims({0.5999, 1.0}), false) == ErrorCategory::Major);
    CHECK(classify_error(with_sims({0.70, 1.0}), false) == ErrorCategory::Minor);
    CHECK(classify_error(with_sims({0.30}), false) == ErrorCategory::Major);
    CHECK(classify_error(with_sims({1.0}), true) == ErrorCategory::Structural);
}

TEST_CASE("missing fields classify as Major") {
    RecordScore s = matched_score({{FieldId::full_title, 1.0}}, {FieldId::year});
    CHECK(classify_error(s, false) == ErrorCategory::Major);
    RecordScore fp = matched_score({{FieldId::full_title, 1.0}}, {}, {FieldId::doi});
    CHECK(classify_error(fp, false) == ErrorCategory::Major);
    CHECK(classify_error(unmatched_gold_score(sample_record()), false) ==
          ErrorCategory::Major);
}

TEST_CASE("configurable thresholds") {
    ClassifyThresholds loose{0.9, 0.5};
    RecordScore s = matched_score({{FieldId::full_title, 0.92}});
    CHECK(classify_error(s, false, loose) == ErrorCategory::Correct);
    CHECK(classify_error(s, false) == ErrorCategory::Minor);
}

TEST_CASE("lowering a field similarity never raises micro or macro") {
    std::mt19937 rng(211);
    std::uniform_real_distribution<double> shrink(0.0, 0.999);
    for (int i = 0; i < 300; ++i) {
        auto scores = random_scores(rng, 2 + i % 5);
        Metrics base = aggregate_micro(scores, {});
        // Degrade one populated field on one matched record.
        std::vector<std::pair<size_t, FieldId>> slots;
        for (size_t k = 0; k < scores.size(); ++k)
            for (const auto& [f, sim] : scores[k].per_field) slots.emplace_back(k, f);
        if (slots.empty()) continue;
        auto [k, f] = slots[rng() % slots.size()];
        scores[k].per_field[f] *= shrink(rng);
        Metrics degraded = aggregate_micro(scores, {});
        CHECK(degraded.micro_f1 <= base.micro_f1 + 1e-12);
        CHECK(degraded.macro_f1 <= base.macro_f1 + 1e-12);
    }
}

TEST_CASE("score_endtoend") {
    std::vector<ReferenceRecord> records;
    std::vector<std::string> raws;
    for (int i = 0; i < 4; ++i) {
        ReferenceRecord r = sample_record();
        r.full_title = "Distinct title number " + std::to_string(i) + " about guilds";
        r.year = std::to_string(1900 + i * 7);
        r.pages = std::to_string(100 + i * 31) + "-" + std::to_string(120 + i * 31);
        records.push_back(r);
        raws.push_back(r.authors[0] + " (" + r.year + "). " + r.full_title + ", pp. " +
                       r.pages + ".");
    }

    SUBCASE("gold-as-prediction is perfect") {
        DocScore doc = score_endtoend(raws, records, records);
        Metrics m = aggregate_micro(doc.record_scores, doc.unmatched_pred_records);
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.micro_f1 == 1.0);
        CHECK(m.macro_f1 == 1.0);
        for (ErrorCategory c : doc.categories) CHECK(c == ErrorCategory::Correct);
    }
    SUBCASE("missing prediction leaves one gold unmatched and Major") {
        auto preds = records;
        preds.pop_back();
        DocScore doc = score_endtoend(raws, records, preds);
        CHECK(doc.record_scores.back().matched == false);
        CHECK(doc.categories.back() == ErrorCategory::Major);
        CHECK(doc.categories.front() == ErrorCategory::Correct);
    }
    SUBCASE("prediction order does not matter") {
        auto shuffled = records;
        std::reverse(shuffled.begin(), shuffled.end());
        DocScore in_order = score_endtoend(raws, records, records);
        DocScore reversed = score_endtoend(raws, records, shuffled);
        Metrics a = aggregate_micro(in_order.record_scores, in_order.unmatched_pred_records);
        Metrics b = aggregate_micro(reversed.record_scores, reversed.unmatched_pred_records);
        CHECK(a.micro_f1 == doctest::Approx(b.micro_f1).epsilon(1e-12));
        CHECK(a.macro_f1 == doctest::Approx(b.macro_f1).epsilon(1e-12));
    }
    SUBCASE("structural failure marks every reference Structural and drops recall") {
        EndToEndOptions opts;
        opts.structural_failure = true;
        DocScore doc = score_endtoend(raws, records, {}, opts);
        CHECK(doc.n_failures == 1);
        for (ErrorCategory c : doc.categories) CHECK(c == ErrorCategory::Structural);
        Metrics m = aggregate_micro(doc.record_scores, doc.unmatched_pred_records);
        CHECK(m.recall == 0.0);
    }
}

TEST_CASE("mixed-error document reproduces the hand-computed metrics") {
    auto rec = [](const char* author, const char* title, const char* year) {
        ReferenceRecord r;
        r.authors = {author};
        r.full_title = title;
        r.year = year;
        return r;
    };
    std::vector<ReferenceRecord> gold = {
        rec("Whitfield, A.", "Municipal archives of the coast", "1931"),
        rec("Okafor, N.", "Colonial trade ledgers reconsidered", "1998"),
        rec("Hartley, R.", "Monastic chronicles and their readers", "1875"),
    };
    std::vector<std::string> raws;
    for (const auto& g : gold)
        raws.push_back(g.authors[0] + " (" + g.year + "). " + g.full_title + ".");

    // Third prediction asserts entirely different fields: every pair of
    // fields is one-sided, so its TP contribution is exactly zero.
    ReferenceRecord off_schema;
    off_schema.doi = "10.9/invented";
    off_schema.pages = "44-61";
    std::vector<ReferenceRecord> pred = {
        gold[0],                                                       // exact
        rec("Okafor, N.", "Colonial trade ledgers reconsidered", "1999"),  // year off
        off_schema,
    };

    DocScore doc = score_endtoend(raws, gold, pred);
    Metrics m = aggregate_micro(doc.record_scores, doc.unmatched_pred_records);

    // TP = 3 + (1 + 1 + 0.75) + 0; 8 predicted fields, 9 gold fields.
    double tp = 5.75;
    CHECK(m.precision == doctest::Approx(tp / 8.0).epsilon(1e-12));
    CHECK(m.recall == doctest::Approx(tp / 9.0).epsilon(1e-12));
    CHECK(m.micro_f1 ==
          doctest::Approx(f1_of(tp / 8.0, tp / 9.0)).epsilon(1e-12));

    // Records: perfect, year-degraded (P = R = 2.75/3), zero-overlap.
    double rec1_f1 = 2.75 / 3.0;
    CHECK(m.macro_f1 == doctest::Approx((1.0 + rec1_f1 + 0.0) / 3.0).epsilon(1e-12));

    REQUIRE(doc.categories.size() == 3);
    CHECK(doc.categories[0] == ErrorCategory::Correct);
    CHECK(doc.categories[1] == ErrorCategory::Minor);
    CHECK(doc.categories[2] == ErrorCategory::Major);
}

TEST_CASE("breakdown pools records per group") {
    ReferenceRecord r = sample_record();
    DocScore d1, d2;
    d1.doc_id = "a";
    d1.language = "en";
    d1.citation_class = 1;
    d1.record_scores = {matched_score({{FieldId::full_title, 1.0}})};
    d1.categories = {ErrorCategory::Correct};
    d2.doc_id = "b";
    d2.language = "de";
    d2.citation_class = 2;
    d2.record_scores = {matched_score({{FieldId::full_title, 0.5}})};
    d2.categories = {ErrorCategory::Major};

    SUBCASE("single group equals global metrics") {
        auto groups = breakdown({d1}, BreakdownKey::language);
        REQUIRE(groups.count("en") == 1);
        Metrics global = pooled_metrics({d1});
        CHECK(groups["en"].metrics.micro_f1 == doctest::Approx(global.micro_f1));
    }
    SUBCASE("two disjoint groups pool independently") {
        auto groups = breakdown({d1, d2}, BreakdownKey::language);
        REQUIRE(groups.size() == 2);
        CHECK(groups["en"].metrics.micro_f1 == doctest::Approx(1.0));
        CHECK(groups["de"].metrics.micro_f1 == doctest::Approx(0.5));
        CHECK(groups["en"].histogram.correct == 1);
        CHECK(groups["de"].histogram.major == 1);
    }
    SUBCASE("citation class labels") {
        auto groups = breakdown({d1, d2}, BreakdownKey::citation_class);
        CHECK(groups.count("class_1") == 1);
        CHECK(groups.count("class_2") == 1);
    }
}
