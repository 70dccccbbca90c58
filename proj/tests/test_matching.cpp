#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <random>

#include "refbench/matching.hpp"

using namespace refbench;

namespace {

SimilarityMatrix mat(size_t rows, size_t cols, std::initializer_list<double> values) {
    SimilarityMatrix m(rows, cols);
    size_t i = 0;
    for (double v : values) m.values[i++] = v;
    return m;
}

SimilarityMatrix random_matrix(std::mt19937& rng, size_t max_dim, bool with_ties) {
    std::uniform_int_distribution<size_t> dim(0, max_dim);
    size_t rows = dim(rng), cols = dim(rng);
    SimilarityMatrix m(rows, cols);
    if (with_ties) {
        std::uniform_int_distribution<int> level(0, 2);
        for (auto& v : m.values) v = level(rng) * 0.5;
    } else {
        std::uniform_real_distribution<double> value(0.0, 1.0);
        for (auto& v : m.values) v = value(rng);
    }
    return m;
}

std::vector<std::pair<size_t, size_t>> pair_indices(const Pairing& p) {
    std::vector<std::pair<size_t, size_t>> out;
    for (const auto& pr : p.pairs) out.emplace_back(pr.gold_index, pr.pred_index);
    return out;
}

}  // namespace

TEST_CASE("similarity_matrix entries") {
    auto m = similarity_matrix({"a"}, {"a"});
    REQUIRE(m.rows == 1);
    REQUIRE(m.cols == 1);
    CHECK(m.at(0, 0) == 1.0);

    auto m2 = similarity_matrix({"aa"}, {"ab", "aa"});
    CHECK(m2.at(0, 0) == doctest::Approx(0.5));
    CHECK(m2.at(0, 1) == 1.0);

    auto m3 = similarity_matrix({}, {"x"});
    CHECK(m3.rows == 0);
    CHECK(m3.cols == 1);
}

TEST_CASE("parallel matrix is bit-identical to the serial reference") {
    std::vector<std::string> gold, pred;
    for (int i = 0; i < 40; ++i) {
        gold.push_back("ref " + std::to_string(i * 7) + " Müller, K. (" +
                       std::to_string(1900 + i) + ")");
        pred.push_back("ref " + std::to_string(i * 5) + " Okafor, N. (" +
                       std::to_string(1910 + i) + ")");
    }
    auto par = similarity_matrix(gold, pred);
    auto ser = similarity_matrix_serial(gold, pred);
    CHECK(par.values == ser.values);
}

TEST_CASE("optimal_assignment pinned examples") {
    SUBCASE("2x2 unique optimum") {
        auto p = optimal_assignment(mat(2, 2, {0.9, 0.2, 0.3, 0.8}));
        CHECK(pair_indices(p) ==
              std::vector<std::pair<size_t, size_t>>{{0, 0}, {1, 1}});
        CHECK(p.total() == doctest::Approx(1.7));
    }
    SUBCASE("identity-like matrix pairs the diagonal") {
        auto p = optimal_assignment(mat(2, 2, {1, 0, 0, 1}));
        CHECK(pair_indices(p) ==
              std::vector<std::pair<size_t, size_t>>{{0, 0}, {1, 1}});
    }
    SUBCASE("1x2 picks the better prediction") {
        auto p = optimal_assignment(mat(1, 2, {0.4, 0.9}));
        CHECK(pair_indices(p) == std::vector<std::pair<size_t, size_t>>{{0, 1}});
        CHECK(p.unmatched_pred == std::vector<size_t>{0});
    }
    SUBCASE("zero-similarity pairs are discarded") {
        auto p = optimal_assignment(mat(2, 2, {0, 0, 0, 0}));
        CHECK(p.pairs.empty());
        CHECK(p.unmatched_gold == std::vector<size_t>{0, 1});
        CHECK(p.unmatched_pred == std::vector<size_t>{0, 1});
    }
    SUBCASE("equal-total optima break ties toward smaller indices") {
        // gold 1 matches preds 1 and 2 equally; the tie goes to pred 1.
        auto p = optimal_assignment(mat(2, 3, {1, 0, 0, 0, 1, 1}));
        CHECK(pair_indices(p) ==
              std::vector<std::pair<size_t, size_t>>{{0, 0}, {1, 1}});
        CHECK(p.unmatched_pred == std::vector<size_t>{2});
    }
}

TEST_CASE("brute_force_assignment basics") {
    auto p = brute_force_assignment(mat(1, 1, {1.0}));
    CHECK(pair_indices(p) == std::vector<std::pair<size_t, size_t>>{{0, 0}});

    auto empty = brute_force_assignment(SimilarityMatrix(0, 0));
    CHECK(empty.pairs.empty());

    CHECK_THROWS_AS(brute_force_assignment(SimilarityMatrix(9, 2)),
                    std::invalid_argument);
}

TEST_CASE("optimal_assignment total equals brute force on 500 random matrices") {
    std::mt19937 rng(2024);
    auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 500; ++i) {
        auto m = random_matrix(rng, 6, false);
        double fast = optimal_assignment(m).total();
        double slow = brute_force_assignment(m).total();
        REQUIRE(fast == doctest::Approx(slow).epsilon(1e-9));
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 5.0);
}

TEST_CASE("tie-break agrees with brute force on tie-heavy matrices") {
    std::mt19937 rng(4096);
    for (int i = 0; i < 300; ++i) {
        auto m = random_matrix(rng, 5, true);
        auto fast = optimal_assignment(m);
        auto slow = brute_force_assignment(m);
        REQUIRE(fast.total() == doctest::Approx(slow.total()).epsilon(1e-9));
        REQUIRE(pair_indices(fast) == pair_indices(slow));
    }
}

TEST_CASE("entrywise decrease never increases the optimal total") {
    std::mt19937 rng(31);
    for (int i = 0; i < 100; ++i) {
        auto m = random_matrix(rng, 5, false);
        if (m.values.empty()) continue;
        double base = optimal_assignment(m).total();
        auto degraded = m;
        std::uniform_int_distribution<size_t> cell(0, m.values.size() - 1);
        std::uniform_real_distribution<double> shrink(0.0, 1.0);
        size_t k = cell(rng);
        degraded.values[k] *= shrink(rng);
        CHECK(optimal_assignment(degraded).total() <= base + 1e-9);
    }
}

TEST_CASE("assignment stays fast on document-sized matrices") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    SimilarityMatrix m(150, 160);
    for (auto& v : m.values) v = value(rng);
    auto start = std::chrono::steady_clock::now();
    Pairing p = optimal_assignment(m);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(p.pairs.size() <= 150);
    CHECK(seconds < 2.0);
}

TEST_CASE("score_extraction identity") {
    auto s = score_extraction({"A", "B"}, {"A", "B"});
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
    REQUIRE(s.avg_sim.has_value());
    CHECK(*s.avg_sim == 1.0);
}

TEST_CASE("duplicates count as false positives") {
    auto s = score_extraction({"A", "B"}, {"A", "B", "B"});
    CHECK(s.tp == doctest::Approx(2.0));
    CHECK(s.precision == doctest::Approx(2.0 / 3.0));
    CHECK(s.recall == doctest::Approx(1.0));
    CHECK(s.f1 == doctest::Approx(0.8));
}

TEST_CASE("adding a duplicate of a matched prediction keeps TP and lowers precision") {
    std::mt19937 rng(37);
    std::uniform_int_distribution<int> year(1900, 1999);
    for (int i = 0; i < 50; ++i) {
        std::vector<std::string> gold, pred;
        int n = 2 + i % 4;
        for (int k = 0; k < n; ++k) {
            std::string s = "ref number " + std::to_string(k) + " year " +
                            std::to_string(year(rng));
            gold.push_back(s);
            pred.push_back(s);
        }
        auto base = score_extraction(gold, pred);
        pred.push_back(pred[0]);
        auto with_dup = score_extraction(gold, pred);
        CHECK(with_dup.tp == doctest::Approx(base.tp));
        if (base.tp > 0) CHECK(with_dup.precision < base.precision);
    }
}

TEST_CASE("scoring gold against itself is all ones for distinct strings") {
    std::vector<std::string> gold;
    for (int i = 0; i < 12; ++i)
        gold.push_back("reference " + std::to_string(i) + " about topic " +
                       std::to_string(i * i));
    auto s = score_extraction(gold, gold);
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.f1 == 1.0);
    CHECK(s.n_matched == gold.size());
}

TEST_CASE("empty-side extraction scores") {
    auto none = score_extraction({"A"}, {});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(!none.avg_sim.has_value());

    auto both_empty = score_extraction(std::vector<std::string>{}, {});
    CHECK(both_empty.precision == 1.0);
    CHECK(both_empty.recall == 1.0);
    CHECK(both_empty.f1 == 1.0);

    auto spurious = score_extraction({}, {"x"});
    CHECK(spurious.precision == 0.0);
    CHECK(spurious.recall == 0.0);
}

TEST_CASE("binary TP threshold switch") {
    ExtractionConfig binary;
    binary.binary_tp_threshold = 0.95;
    auto s = score_extraction({"alpha beta gamma", "delta"}, {"alpha beta gamma", "delt"},
                              binary);
    CHECK(s.tp == doctest::Approx(1.0));  // only the exact match clears 0.95
    CHECK(s.precision == doctest::Approx(0.5));
    REQUIRE(s.avg_sim.has_value());
    CHECK(*s.avg_sim > 0.85);  // avg_sim stays the mean similarity
}
