#pragma once

#include <string>
#include <vector>

#include "refbench/corpus.hpp"

namespace refbench {

// Deterministic demo corpus: English end-section documents, German
// footnote-only and mixed documents (with verbatim abbreviated
// back-references) and Italian/French bibliographies. Reference strings
// appear verbatim in the markdown; reference-bearing pages stay within a
// quarter of each document's pages.
std::vector<DocumentGold> make_synthetic_corpus();

// The same corpus flattened to reference level (parse-task gold).
std::vector<ReferenceGold> make_synthetic_references();

std::string corpus_to_jsonl(const std::vector<DocumentGold>& docs);
std::string references_to_jsonl(const std::vector<ReferenceGold>& refs);

}  // namespace refbench
