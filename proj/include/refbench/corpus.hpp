#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refbench/schema.hpp"

namespace refbench {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed gold data; carries the 1-based line number when known.
struct FormatError : std::runtime_error {
    int line = 0;
    FormatError(std::string msg, int line_no)
        : std::runtime_error(std::move(msg)), line(line_no) {}
};

struct XmlError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// EXCITE citation placement classes; 0 = unknown.
enum CitationClass { kClassUnknown = 0, kEndSection = 1, kFootnoteOnly = 2, kMixed = 3 };

// One document with its verbatim gold reference strings, in original order
// and never back-reference-resolved.
struct DocumentGold {
    std::string doc_id;
    std::string language;
    int citation_class = kClassUnknown;
    std::string category;
    std::string markdown;
    std::string pdf_path;
    std::vector<std::string> gold_strings;
    std::vector<ReferenceRecord> gold_records;  // aligned; empty if absent
    std::vector<bool> abbreviated_backref;      // aligned to gold_strings
    bool has_records = false;
};

struct ReferenceGold {
    std::string ref_id;
    std::string doc_id;
    std::string language;
    std::string raw;
    ReferenceRecord record;
};

struct LoaderOptions {
    bool strict = false;  // abort on the first malformed line
    std::function<void(int line, const std::string& message)> on_skip;
};

std::vector<DocumentGold> load_document_gold(const std::string& path,
                                             const LoaderOptions& opts = {});
std::vector<ReferenceGold> load_reference_gold(const std::string& path,
                                               const LoaderOptions& opts = {});

DocumentGold document_gold_from_json_line(const std::string& line);
ReferenceGold reference_gold_from_json_line(const std::string& line);

std::string document_gold_to_json_line(const DocumentGold& doc);
std::string reference_gold_to_json_line(const ReferenceGold& ref);

// One biblStruct mapped to the target schema, with the element's
// whitespace-collapsed text content as the raw string.
struct TeiEntry {
    std::string raw;
    ReferenceRecord record;
};

// Maps TEI listBibl/biblStruct elements (GROBID citation model) into the
// target schema. A TEI document without a listBibl yields an empty list.
std::vector<TeiEntry> import_tei(const std::string& tei_text);

struct Page {
    int index = 0;  // 1-based
    std::string text;
};

inline constexpr const char* kDefaultPageBreakPattern = "^\f$";

// Splits markdown into pages on lines matching the break pattern.
// Break lines are excluded; a trailing empty page is dropped.
std::vector<Page> page_split(const std::string& markdown,
                             const std::string& line_pattern = kDefaultPageBreakPattern);

}  // namespace refbench
