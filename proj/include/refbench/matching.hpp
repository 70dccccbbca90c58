#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace refbench {

// Row-major gold x predicted similarity matrix, entries in [0,1].
struct SimilarityMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;

    SimilarityMatrix() = default;
    SimilarityMatrix(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& at(size_t i, size_t j) { return values[i * cols + j]; }
    double at(size_t i, size_t j) const { return values[i * cols + j]; }
};

struct MatchedPair {
    size_t gold_index;
    size_t pred_index;
    double similarity;
};

// Soft one-to-one matching: pairs plus the leftovers on both sides.
struct Pairing {
    std::vector<MatchedPair> pairs;        // sorted by gold_index
    std::vector<size_t> unmatched_gold;
    std::vector<size_t> unmatched_pred;

    double total() const {
        double t = 0.0;
        for (const auto& p : pairs) t += p.similarity;
        return t;
    }
};

// Pairwise string_similarity over normalized strings. The parallel kernel
// and the serial reference produce bit-identical matrices; the serial one
// is kept for tests and the benchmark.
SimilarityMatrix similarity_matrix(const std::vector<std::string>& gold,
                                   const std::vector<std::string>& pred);
SimilarityMatrix similarity_matrix_serial(const std::vector<std::string>& gold,
                                          const std::vector<std::string>& pred);

// Maximum-total one-to-one assignment. Zero-similarity pairs are discarded
// to unmatched; among equal-total optima the pairing lexicographically
// smallest in (gold_index, pred_index) wins.
Pairing optimal_assignment(const SimilarityMatrix& m);

// Exhaustive oracle, same contract; dimensions above 8 are refused.
Pairing brute_force_assignment(const SimilarityMatrix& m);

struct ExtractionConfig {
    // When set, a matched pair counts as 1 toward TP iff its similarity
    // reaches the threshold; default is partial credit (sum of sims).
    std::optional<double> binary_tp_threshold;
};

struct ExtractionScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::optional<double> avg_sim;  // only when n_matched > 0
    double tp = 0.0;
    size_t n_gold = 0;
    size_t n_pred = 0;
    size_t n_matched = 0;
};

double f1_of(double precision, double recall);

// String-level extraction scoring: TP is the summed pair similarity,
// duplicates land in unmatched_pred and cost precision.
ExtractionScore score_extraction(const std::vector<std::string>& gold,
                                 const std::vector<std::string>& pred,
                                 const ExtractionConfig& cfg = {});

ExtractionScore score_extraction(const SimilarityMatrix& m,
                                 const ExtractionConfig& cfg = {});

}  // namespace refbench
