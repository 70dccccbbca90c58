#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace refbench {

// The fixed target schema shared by LLM outputs, GROBID mappings and gold
// data. Every field is optional; an absent field means "not asserted".
struct ReferenceRecord {
    std::vector<std::string> authors;
    std::vector<std::string> editors;
    std::string full_title;
    std::string container_title;
    std::string publisher;
    std::string place;
    std::string year;
    std::string volume;
    std::string issue;
    std::string pages;
    std::string doi;
    std::string url;
    std::optional<std::string> raw;

    bool operator==(const ReferenceRecord&) const = default;
};

// Scored fields, in canonical-string order. `raw` is never scored.
enum class FieldId {
    authors,
    full_title,
    editors,
    container_title,
    volume,
    issue,
    place,
    publisher,
    year,
    pages,
    doi,
    url,
};

inline constexpr std::array<FieldId, 12> kAllFields = {
    FieldId::authors,   FieldId::full_title, FieldId::editors,
    FieldId::container_title, FieldId::volume, FieldId::issue,
    FieldId::place,     FieldId::publisher,  FieldId::year,
    FieldId::pages,     FieldId::doi,        FieldId::url,
};

const char* field_name(FieldId f);
std::optional<FieldId> field_from_name(const std::string& name);

bool is_list_field(FieldId f);
bool field_present(const ReferenceRecord& r, FieldId f);

// Number of populated scored fields (authors counts as one field).
int populated_field_count(const ReferenceRecord& r);

// True when no field besides `raw` is populated.
bool record_is_empty(const ReferenceRecord& r);

enum class FailureKind {
    malformed_json,
    empty_output,
    truncated,
    schema_violation,
    transport_error,
};

const char* failure_kind_name(FailureKind k);
std::optional<FailureKind> failure_kind_from_name(const std::string& name);

// A model output that could not be validated. Carries the verbatim raw
// output so every failure is auditable.
struct StructuralFailure {
    FailureKind kind = FailureKind::malformed_json;
    int attempts = 1;
    std::string raw_output;
    std::string detail;
};

template <typename T>
using Fallible = std::variant<T, StructuralFailure>;

template <typename T>
bool is_failure(const Fallible<T>& v) {
    return std::holds_alternative<StructuralFailure>(v);
}

// Collects non-fatal validation notes (unknown keys dropped, coerced
// values, empty records skipped).
struct ValidationLog {
    std::vector<std::string> warnings;
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

// Parses one JSON object against the schema. Unknown keys are dropped and
// logged; scalar numbers in string fields are coerced with a warning.
Fallible<ReferenceRecord> validate_record(const std::string& json_text,
                                          ValidationLog* log = nullptr);

// Parses a JSON list of records. A lone object is accepted as a
// one-element list; an unterminated list is reported as truncated.
Fallible<std::vector<ReferenceRecord>> validate_record_list(
    const std::string& json_text, ValidationLog* log = nullptr);

// Parses a JSON list of plain strings (extraction output).
Fallible<std::vector<std::string>> validate_string_list(
    const std::string& json_text, ValidationLog* log = nullptr);

// Joins the non-empty fields in the fixed field order with ", ".
// Author and editor lists are joined with "; " first.
std::string canonical_string(const ReferenceRecord& r);

// Serializes a record to a JSON object holding only populated schema
// fields; validate_record(record_to_json(r).dump()) round-trips r.
std::string record_to_json_text(const ReferenceRecord& r);

// The schema block embedded in prompts and published under docs/.
// Field names here are a bit-exact contract with the prompt templates.
const std::string& schema_json_document();

}  // namespace refbench
