#pragma once

#include <string>
#include <vector>

#include "refbench/schema.hpp"

namespace refbench {

// Case-folds, replaces punctuation (Unicode category P) by spaces and
// collapses whitespace runs. All matching and scoring normalize through
// this before comparing.
std::string normalize_text(const std::string& s);

// normalize_text, decoded to code points (the unit Levenshtein runs on).
std::vector<char32_t> normalize_to_codepoints(const std::string& s);

size_t levenshtein(const std::vector<char32_t>& a, const std::vector<char32_t>& b);

// 1 - lev(norm(a), norm(b)) / max(|norm(a)|, |norm(b)|).
// Both normalized strings empty => 1.0; exactly one empty => 0.0.
double string_similarity(const std::string& a, const std::string& b);

// Similarity on pre-normalized code point sequences (used by the batch
// similarity-matrix kernel to avoid re-normalizing).
double codepoint_similarity(const std::vector<char32_t>& a,
                            const std::vector<char32_t>& b);

// A person name split into normalized tokens. When the input contained a
// comma, the tokens before it form the surname block and surname_len
// records its length; rotating that block to the end gives the
// "First M. Surname" reading.
struct CanonicalName {
    std::vector<std::string> tokens;
    int surname_len = 0;  // 0 = no comma in the input

    bool empty() const { return tokens.empty(); }
};

CanonicalName canonicalize_name(const std::string& s);

// Order-insensitive name similarity: equal token multisets score 1.0;
// otherwise the best string_similarity over the as-given and
// surname-rotated orderings of either side.
double name_similarity(const CanonicalName& g, const CanonicalName& p);
double name_similarity(const std::string& g, const std::string& p);

// Optimal one-to-one assignment over pairwise name similarities,
// normalized by max(|gold|, |pred|). Both lists empty => 1.0.
double author_list_similarity(const std::vector<std::string>& gold,
                              const std::vector<std::string>& pred);

struct FieldSimConfig {
    bool year_exact = false;  // score year by exact normalized match
};

// Per-field dispatch: authors/editors use author_list_similarity, all
// other fields use string_similarity.
double field_similarity(FieldId field, const ReferenceRecord& gold,
                        const ReferenceRecord& pred,
                        const FieldSimConfig& cfg = {});

}  // namespace refbench
