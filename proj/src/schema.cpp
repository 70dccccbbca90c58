#include "refbench/schema.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

using nlohmann::json;

namespace refbench {

namespace {

struct FieldMeta {
    FieldId id;
    const char* name;
    bool list;
};

constexpr FieldMeta kFieldMeta[] = {
    {FieldId::authors, "authors", true},
    {FieldId::full_title, "full_title", false},
    {FieldId::editors, "editors", true},
    {FieldId::container_title, "container_title", false},
    {FieldId::volume, "volume", false},
    {FieldId::issue, "issue", false},
    {FieldId::place, "place", false},
    {FieldId::publisher, "publisher", false},
    {FieldId::year, "year", false},
    {FieldId::pages, "pages", false},
    {FieldId::doi, "doi", false},
    {FieldId::url, "url", false},
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n\f\v");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(a, b - a + 1);
}

std::string& scalar_slot(ReferenceRecord& r, FieldId f) {
    switch (f) {
        case FieldId::full_title: return r.full_title;
        case FieldId::container_title: return r.container_title;
        case FieldId::publisher: return r.publisher;
        case FieldId::place: return r.place;
        case FieldId::year: return r.year;
        case FieldId::volume: return r.volume;
        case FieldId::issue: return r.issue;
        case FieldId::pages: return r.pages;
        case FieldId::doi: return r.doi;
        case FieldId::url: return r.url;
        default: break;
    }
    static std::string dummy;
    return dummy;
}

const std::string& scalar_value(const ReferenceRecord& r, FieldId f) {
    return scalar_slot(const_cast<ReferenceRecord&>(r), f);
}

// The parser points past the last byte when the input simply stops.
bool looks_truncated(const json::parse_error& ex, const std::string& input) {
    return ex.byte > input.size();
}

StructuralFailure fail(FailureKind kind, const std::string& raw, std::string detail) {
    StructuralFailure f;
    f.kind = kind;
    f.raw_output = raw;
    f.detail = std::move(detail);
    return f;
}

// Fills one schema field from a JSON value. Returns false on a shape the
// schema cannot accept (the caller turns that into a schema_violation).
bool assign_field(ReferenceRecord& rec, FieldId f, const json& v,
                  ValidationLog* log, std::string* why) {
    if (v.is_null()) return true;
    if (is_list_field(f)) {
        if (!v.is_array()) {
            *why = std::string(field_name(f)) + " must be a list";
            return false;
        }
        std::vector<std::string> names;
        for (const auto& item : v) {
            if (!item.is_string()) {
                *why = std::string(field_name(f)) + " entries must be strings";
                return false;
            }
            std::string name = trim(item.get<std::string>());
            if (name.empty()) {
                if (log) log->warn(std::string("dropped empty ") + field_name(f) + " entry");
                continue;
            }
            names.push_back(std::move(name));
        }
        if (f == FieldId::authors)
            rec.authors = std::move(names);
        else
            rec.editors = std::move(names);
        return true;
    }
    std::string text;
    if (v.is_string()) {
        text = v.get<std::string>();
    } else if (v.is_number_integer()) {
        text = std::to_string(v.get<long long>());
        if (log) log->warn(std::string("coerced number to string for ") + field_name(f));
    } else if (v.is_number()) {
        text = v.dump();
        if (log) log->warn(std::string("coerced number to string for ") + field_name(f));
    } else {
        *why = std::string(field_name(f)) + " must be a string";
        return false;
    }
    scalar_slot(rec, f) = trim(text);
    return true;
}

Fallible<ReferenceRecord> record_from_json(const json& obj, const std::string& raw,
                                           ValidationLog* log) {
    if (!obj.is_object())
        return fail(FailureKind::schema_violation, raw, "expected a JSON object");
    ReferenceRecord rec;
    for (const auto& [key, value] : obj.items()) {
        if (key == "raw") {
            if (value.is_string()) rec.raw = value.get<std::string>();
            continue;
        }
        auto f = field_from_name(key);
        if (!f) {
            if (log) log->warn("dropped unknown key \"" + key + "\"");
            continue;
        }
        std::string why;
        if (!assign_field(rec, *f, value, log, &why))
            return fail(FailureKind::schema_violation, raw, why);
    }
    return rec;
}

}  // namespace

const char* field_name(FieldId f) {
    return kFieldMeta[static_cast<int>(f)].name;
}

std::optional<FieldId> field_from_name(const std::string& name) {
    for (const auto& m : kFieldMeta)
        if (name == m.name) return m.id;
    return std::nullopt;
}

bool is_list_field(FieldId f) {
    return f == FieldId::authors || f == FieldId::editors;
}

bool field_present(const ReferenceRecord& r, FieldId f) {
    if (f == FieldId::authors) return !r.authors.empty();
    if (f == FieldId::editors) return !r.editors.empty();
    return !scalar_value(r, f).empty();
}

int populated_field_count(const ReferenceRecord& r) {
    int n = 0;
    for (FieldId f : kAllFields) n += field_present(r, f);
    return n;
}

bool record_is_empty(const ReferenceRecord& r) {
    return populated_field_count(r) == 0;
}

const char* failure_kind_name(FailureKind k) {
    switch (k) {
        case FailureKind::malformed_json: return "malformed_json";
        case FailureKind::empty_output: return "empty_output";
        case FailureKind::truncated: return "truncated";
        case FailureKind::schema_violation: return "schema_violation";
        case FailureKind::transport_error: return "transport_error";
    }
    return "unknown";
}

std::optional<FailureKind> failure_kind_from_name(const std::string& name) {
    for (FailureKind k : {FailureKind::malformed_json, FailureKind::empty_output,
                          FailureKind::truncated, FailureKind::schema_violation,
                          FailureKind::transport_error})
        if (name == failure_kind_name(k)) return k;
    return std::nullopt;
}

Fallible<ReferenceRecord> validate_record(const std::string& json_text,
                                          ValidationLog* log) {
    if (trim(json_text).empty())
        return fail(FailureKind::empty_output, json_text, "blank output");
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        return fail(FailureKind::malformed_json, json_text, ex.what());
    }
    auto rec = record_from_json(obj, json_text, log);
    if (is_failure(rec)) return rec;
    if (record_is_empty(std::get<ReferenceRecord>(rec)))
        return fail(FailureKind::schema_violation, json_text, "no schema field populated");
    return rec;
}

Fallible<std::vector<ReferenceRecord>> validate_record_list(
    const std::string& json_text, ValidationLog* log) {
    std::string trimmed = trim(json_text);
    if (trimmed.empty())
        return fail(FailureKind::empty_output, json_text, "blank output");
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        FailureKind kind = (trimmed.front() == '[' && looks_truncated(ex, json_text))
                               ? FailureKind::truncated
                               : FailureKind::malformed_json;
        return fail(kind, json_text, ex.what());
    }
    if (parsed.is_object()) {
        // Several backends answer a list prompt with a single record.
        if (log) log->warn("accepted a lone object as a one-element list");
        parsed = json::array({parsed});
    }
    if (!parsed.is_array())
        return fail(FailureKind::schema_violation, json_text, "expected a JSON list");
    std::vector<ReferenceRecord> out;
    for (const auto& item : parsed) {
        auto rec = record_from_json(item, json_text, log);
        if (is_failure(rec)) return std::get<StructuralFailure>(rec);
        if (record_is_empty(std::get<ReferenceRecord>(rec))) {
            if (log) log->warn("dropped record with no populated field");
            continue;
        }
        out.push_back(std::move(std::get<ReferenceRecord>(rec)));
    }
    return out;
}

Fallible<std::vector<std::string>> validate_string_list(
    const std::string& json_text, ValidationLog* log) {
    std::string trimmed = trim(json_text);
    if (trimmed.empty())
        return fail(FailureKind::empty_output, json_text, "blank output");
    json parsed;
    try {
        parsed = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        FailureKind kind = (trimmed.front() == '[' && looks_truncated(ex, json_text))
                               ? FailureKind::truncated
                               : FailureKind::malformed_json;
        return fail(kind, json_text, ex.what());
    }
    if (parsed.is_string()) {
        if (log) log->warn("accepted a lone string as a one-element list");
        parsed = json::array({parsed});
    }
    if (!parsed.is_array())
        return fail(FailureKind::schema_violation, json_text, "expected a JSON list");
    std::vector<std::string> out;
    for (const auto& item : parsed) {
        if (!item.is_string())
            return fail(FailureKind::schema_violation, json_text,
                        "list entries must be strings");
        std::string s = trim(item.get<std::string>());
        if (s.empty()) {
            if (log) log->warn("dropped blank extracted string");
            continue;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string canonical_string(const ReferenceRecord& r) {
    auto join = [](const std::vector<std::string>& parts, const char* sep) {
        std::string out;
        for (const auto& p : parts) {
            if (!out.empty()) out += sep;
            out += p;
        }
        return out;
    };
    std::vector<std::string> parts;
    for (FieldId f : kAllFields) {
        if (!field_present(r, f)) continue;
        if (f == FieldId::authors)
            parts.push_back(join(r.authors, "; "));
        else if (f == FieldId::editors)
            parts.push_back(join(r.editors, "; "));
        else
            parts.push_back(scalar_value(r, f));
    }
    return join(parts, ", ");
}

std::string record_to_json_text(const ReferenceRecord& r) {
    json obj = json::object();
    for (FieldId f : kAllFields) {
        if (!field_present(r, f)) continue;
        if (f == FieldId::authors)
            obj["authors"] = r.authors;
        else if (f == FieldId::editors)
            obj["editors"] = r.editors;
        else
            obj[field_name(f)] = scalar_value(r, f);
    }
    if (r.raw) obj["raw"] = *r.raw;
    return obj.dump();
}

const std::string& schema_json_document() {
    static const std::string doc = json{
        {"$schema", "http://json-schema.org/draft-07/schema#"},
        {"title", "ReferenceRecord"},
        {"type", "object"},
        {"additionalProperties", false},
        {"properties",
         {
             {"authors", {{"type", "array"}, {"items", {{"type", "string"}}},
                          {"description", "person names, original order"}}},
             {"editors", {{"type", "array"}, {"items", {{"type", "string"}}},
                          {"description", "person names, original order"}}},
             {"full_title", {{"type", "string"}}},
             {"container_title",
              {{"type", "string"},
               {"description", "journal, venue or host monograph"}}},
             {"publisher", {{"type", "string"}}},
             {"place", {{"type", "string"}, {"description", "publication place"}}},
             {"year", {{"type", "string"},
                       {"description", "verbatim year token, e.g. \"1998\" or \"1998/99\""}}},
             {"volume", {{"type", "string"}}},
             {"issue", {{"type", "string"}}},
             {"pages", {{"type", "string"}}},
             {"doi", {{"type", "string"}}},
             {"url", {{"type", "string"}}},
             {"raw", {{"type", "string"},
                      {"description", "source reference text when known"}}},
         }},
    }.dump(2) + "\n";
    return doc;
}

}  // namespace refbench
