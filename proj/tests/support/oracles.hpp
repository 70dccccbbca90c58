#pragma once

// Test-only reference implementations, kept independent of the library
// code paths they check.

#include <cstddef>
#include <string>
#include <vector>

#include "refbench/fieldscore.hpp"

namespace oracles {

// Full-matrix Levenshtein over code points with its own UTF-8 decoder.
size_t lev(const std::string& a, const std::string& b);
size_t lev32(const std::vector<char32_t>& a, const std::vector<char32_t>& b);
std::vector<char32_t> decode(const std::string& utf8);

// Normalized similarity computed from scratch on pre-normalized inputs.
double sim_from_normalized(const std::string& norm_a, const std::string& norm_b);

// From-scratch pooled micro precision/recall/F1 over record scores.
struct PooledOracle {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};
PooledOracle pooled_micro(const std::vector<refbench::RecordScore>& scores,
                          const std::vector<refbench::ReferenceRecord>& unmatched_preds);

// Canonical string rebuilt by an independent re-implementation of the
// join rule.
std::string canonical_oracle(const refbench::ReferenceRecord& r);

}  // namespace oracles
