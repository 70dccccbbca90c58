#include "refbench/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

using nlohmann::json;
namespace pt = boost::property_tree;

namespace refbench {

namespace {

std::string collapse_ws(const std::string& s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            pending = !out.empty();
            continue;
        }
        if (pending) {
            out += ' ';
            pending = false;
        }
        out += c;
    }
    return out;
}

json parse_line(const std::string& line, int line_no) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& ex) {
        throw FormatError(std::string("invalid JSON: ") + ex.what(), line_no);
    }
}

std::string require_string(const json& obj, const char* key, int line_no) {
    if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty())
        throw FormatError(std::string("missing or empty \"") + key + "\"", line_no);
    return obj[key].get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
    if (obj.contains(key) && obj[key].is_string()) return obj[key].get<std::string>();
    return "";
}

ReferenceRecord record_from(const json& obj, int line_no) {
    auto parsed = validate_record(obj.dump());
    if (is_failure(parsed))
        throw FormatError("invalid record: " + std::get<StructuralFailure>(parsed).detail,
                          line_no);
    return std::get<ReferenceRecord>(parsed);
}

template <typename T>
std::vector<T> load_jsonl(const std::string& path, const LoaderOptions& opts,
                          T (*parse)(const std::string&, int),
                          void (*check)(const T&, std::set<std::string>&, int)) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<T> out;
    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (collapse_ws(line).empty()) continue;
        try {
            T item = parse(line, line_no);
            check(item, seen_ids, line_no);
            out.push_back(std::move(item));
        } catch (const FormatError& ex) {
            if (opts.strict) throw;
            if (opts.on_skip) opts.on_skip(ex.line, ex.what());
        }
    }
    if (in.bad()) throw IoError("read error on " + path);
    return out;
}

DocumentGold parse_document_line(const std::string& line, int line_no) {
    json obj = parse_line(line, line_no);
    if (!obj.is_object()) throw FormatError("expected a JSON object", line_no);
    DocumentGold doc;
    doc.doc_id = require_string(obj, "doc_id", line_no);
    doc.language = optional_string(obj, "language");
    doc.category = optional_string(obj, "category");
    doc.markdown = optional_string(obj, "markdown");
    doc.pdf_path = optional_string(obj, "pdf_path");
    if (obj.contains("citation_class") && obj["citation_class"].is_number_integer()) {
        int c = obj["citation_class"].get<int>();
        doc.citation_class = (c >= 1 && c <= 3) ? c : kClassUnknown;
    }
    if (obj.contains("references")) {
        if (!obj["references"].is_array())
            throw FormatError("\"references\" must be a list", line_no);
        size_t with_record = 0;
        for (const auto& ref : obj["references"]) {
            if (!ref.is_object() || !ref.contains("raw") || !ref["raw"].is_string())
                throw FormatError("reference entries need a \"raw\" string", line_no);
            doc.gold_strings.push_back(ref["raw"].get<std::string>());
            doc.abbreviated_backref.push_back(ref.value("abbreviated_backref", false));
            if (ref.contains("record")) {
                doc.gold_records.push_back(record_from(ref["record"], line_no));
                ++with_record;
            }
        }
        if (with_record > 0 && with_record != doc.gold_strings.size())
            throw FormatError("either all references carry a record or none", line_no);
        doc.has_records = with_record > 0;
    }
    return doc;
}

void check_document(const DocumentGold& doc, std::set<std::string>& seen, int line_no) {
    if (!seen.insert(doc.doc_id).second)
        throw FormatError("duplicate doc_id \"" + doc.doc_id + "\"", line_no);
}

ReferenceGold parse_reference_line(const std::string& line, int line_no) {
    json obj = parse_line(line, line_no);
    if (!obj.is_object()) throw FormatError("expected a JSON object", line_no);
    ReferenceGold ref;
    ref.ref_id = require_string(obj, "ref_id", line_no);
    ref.raw = require_string(obj, "raw", line_no);
    ref.doc_id = optional_string(obj, "doc_id");
    ref.language = optional_string(obj, "language");
    if (!obj.contains("record")) throw FormatError("missing \"record\"", line_no);
    ref.record = record_from(obj["record"], line_no);
    return ref;
}

void check_reference(const ReferenceGold& ref, std::set<std::string>& seen, int line_no) {
    if (!seen.insert(ref.ref_id).second)
        throw FormatError("duplicate ref_id \"" + ref.ref_id + "\"", line_no);
}

}  // namespace

std::vector<DocumentGold> load_document_gold(const std::string& path,
                                             const LoaderOptions& opts) {
    return load_jsonl<DocumentGold>(path, opts, parse_document_line, check_document);
}

std::vector<ReferenceGold> load_reference_gold(const std::string& path,
                                               const LoaderOptions& opts) {
    return load_jsonl<ReferenceGold>(path, opts, parse_reference_line, check_reference);
}

DocumentGold document_gold_from_json_line(const std::string& line) {
    return parse_document_line(line, 0);
}

ReferenceGold reference_gold_from_json_line(const std::string& line) {
    return parse_reference_line(line, 0);
}

std::string document_gold_to_json_line(const DocumentGold& doc) {
    json refs = json::array();
    for (size_t i = 0; i < doc.gold_strings.size(); ++i) {
        json ref = {{"raw", doc.gold_strings[i]}};
        if (doc.has_records) ref["record"] = json::parse(record_to_json_text(doc.gold_records[i]));
        if (i < doc.abbreviated_backref.size() && doc.abbreviated_backref[i])
            ref["abbreviated_backref"] = true;
        refs.push_back(std::move(ref));
    }
    json obj = {{"doc_id", doc.doc_id}, {"references", refs}};
    if (!doc.language.empty()) obj["language"] = doc.language;
    if (doc.citation_class != kClassUnknown) obj["citation_class"] = doc.citation_class;
    if (!doc.category.empty()) obj["category"] = doc.category;
    if (!doc.markdown.empty()) obj["markdown"] = doc.markdown;
    if (!doc.pdf_path.empty()) obj["pdf_path"] = doc.pdf_path;
    return obj.dump();
}

std::string reference_gold_to_json_line(const ReferenceGold& ref) {
    json obj = {{"ref_id", ref.ref_id},
                {"raw", ref.raw},
                {"record", json::parse(record_to_json_text(ref.record))}};
    if (!ref.doc_id.empty()) obj["doc_id"] = ref.doc_id;
    if (!ref.language.empty()) obj["language"] = ref.language;
    return obj.dump();
}

namespace {

std::string local_name(const std::string& key) {
    size_t colon = key.rfind(':');
    return colon == std::string::npos ? key : key.substr(colon + 1);
}

void gather_text(const pt::ptree& node, std::string& out) {
    out += node.data();
    out += ' ';
    for (const auto& kv : node) {
        if (kv.first == "<xmlattr>") continue;
        gather_text(kv.second, out);
    }
}

std::string attr(const pt::ptree& node, const char* name) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return "";
    for (const auto& kv : *attrs)
        if (local_name(kv.first) == name) return kv.second.data();
    return "";
}

const pt::ptree* child(const pt::ptree& node, const char* name) {
    for (const auto& kv : node)
        if (local_name(kv.first) == name) return &kv.second;
    return nullptr;
}

std::vector<const pt::ptree*> children(const pt::ptree& node, const char* name) {
    std::vector<const pt::ptree*> out;
    for (const auto& kv : node)
        if (local_name(kv.first) == name) out.push_back(&kv.second);
    return out;
}

std::string person_name(const pt::ptree& pers) {
    std::string forenames, surname;
    for (const auto& kv : pers) {
        std::string name = local_name(kv.first);
        std::string text = collapse_ws(kv.second.data());
        if (text.empty()) continue;
        if (name == "forename") {
            if (!forenames.empty()) forenames += ' ';
            forenames += text;
        } else if (name == "surname") {
            if (!surname.empty()) surname += ' ';
            surname += text;
        }
    }
    if (surname.empty()) return collapse_ws(forenames);
    if (forenames.empty()) return surname;
    return surname + ", " + forenames;
}

void collect_persons(const pt::ptree& parent, const char* tag,
                     std::vector<std::string>& out) {
    for (const pt::ptree* el : children(parent, tag)) {
        const pt::ptree* pers = child(*el, "persName");
        std::string name = pers ? person_name(*pers) : collapse_ws(el->data());
        if (!name.empty()) out.push_back(name);
    }
}

std::string first_year_token(const std::string& text) {
    static const std::regex year_re("(1[0-9]{3}|2[0-9]{3})");
    std::smatch m;
    if (std::regex_search(text, m, year_re)) return m[1].str();
    return "";
}

TeiEntry map_biblstruct(const pt::ptree& bibl) {
    TeiEntry entry;
    ReferenceRecord& rec = entry.record;

    const pt::ptree* analytic = child(bibl, "analytic");
    const pt::ptree* monogr = child(bibl, "monogr");

    std::string analytic_title, monogr_title;
    if (analytic) {
        if (const pt::ptree* t = child(*analytic, "title"))
            analytic_title = collapse_ws(t->data());
        collect_persons(*analytic, "author", rec.authors);
        collect_persons(*analytic, "editor", rec.editors);
    }
    if (monogr) {
        if (const pt::ptree* t = child(*monogr, "title"))
            monogr_title = collapse_ws(t->data());
        if (rec.authors.empty()) collect_persons(*monogr, "author", rec.authors);
        collect_persons(*monogr, "editor", rec.editors);
    }
    if (!analytic_title.empty()) {
        rec.full_title = analytic_title;
        rec.container_title = monogr_title;
    } else {
        rec.full_title = monogr_title;
    }

    if (monogr) {
        if (const pt::ptree* imprint = child(*monogr, "imprint")) {
            if (const pt::ptree* date = child(*imprint, "date")) {
                std::string when = attr(*date, "when");
                rec.year = first_year_token(when.empty() ? date->data() : when);
            }
            if (const pt::ptree* pub = child(*imprint, "publisher"))
                rec.publisher = collapse_ws(pub->data());
            if (const pt::ptree* place = child(*imprint, "pubPlace"))
                rec.place = collapse_ws(place->data());
            for (const pt::ptree* scope : children(*imprint, "biblScope")) {
                std::string unit = attr(*scope, "unit");
                std::string text = collapse_ws(scope->data());
                if (unit == "volume") {
                    rec.volume = text;
                } else if (unit == "issue") {
                    rec.issue = text;
                } else if (unit == "page") {
                    if (text.empty()) {
                        std::string from = attr(*scope, "from"), to = attr(*scope, "to");
                        text = to.empty() ? from : from + "-" + to;
                    }
                    rec.pages = text;
                }
            }
        }
    }

    for (const pt::ptree* idno : children(bibl, "idno")) {
        std::string type = attr(*idno, "type");
        std::transform(type.begin(), type.end(), type.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (type == "doi" && rec.doi.empty()) rec.doi = collapse_ws(idno->data());
    }

    std::string raw;
    gather_text(bibl, raw);
    entry.raw = collapse_ws(raw);
    return entry;
}

void find_listbibl(const pt::ptree& node, std::vector<const pt::ptree*>& out) {
    for (const auto& kv : node) {
        if (kv.first == "<xmlattr>") continue;
        if (local_name(kv.first) == "listBibl")
            out.push_back(&kv.second);
        else
            find_listbibl(kv.second, out);
    }
}

void find_toplevel_biblstructs(const pt::ptree& node, std::vector<const pt::ptree*>& out) {
    for (const auto& kv : node) {
        if (kv.first == "<xmlattr>") continue;
        if (local_name(kv.first) == "biblStruct")
            out.push_back(&kv.second);
        else
            find_toplevel_biblstructs(kv.second, out);
    }
}

}  // namespace

std::vector<TeiEntry> import_tei(const std::string& tei_text) {
    pt::ptree tree;
    std::istringstream is(tei_text);
    try {
        pt::read_xml(is, tree);
    } catch (const pt::xml_parser_error& ex) {
        throw XmlError(std::string("TEI parse failed: ") + ex.what());
    }

    std::vector<const pt::ptree*> lists;
    find_listbibl(tree, lists);

    std::vector<const pt::ptree*> bibls;
    if (!lists.empty()) {
        for (const pt::ptree* list : lists)
            for (const pt::ptree* b : children(*list, "biblStruct")) bibls.push_back(b);
    } else {
        // processCitationList responses sometimes carry bare biblStructs.
        find_toplevel_biblstructs(tree, bibls);
    }

    std::vector<TeiEntry> out;
    for (const pt::ptree* b : bibls) out.push_back(map_biblstruct(*b));
    return out;
}

std::vector<Page> page_split(const std::string& markdown, const std::string& line_pattern) {
    std::regex break_re(line_pattern);

    std::vector<std::string> segments;
    size_t start = 0;
    while (true) {
        size_t nl = markdown.find('\n', start);
        if (nl == std::string::npos) {
            segments.push_back(markdown.substr(start));
            break;
        }
        segments.push_back(markdown.substr(start, nl - start));
        start = nl + 1;
    }

    std::vector<Page> pages;
    std::string current;
    bool current_has_lines = false;
    auto flush = [&]() {
        pages.push_back({static_cast<int>(pages.size()) + 1, current});
        current.clear();
        current_has_lines = false;
    };
    for (const std::string& seg : segments) {
        if (std::regex_match(seg, break_re)) {
            flush();
            continue;
        }
        if (current_has_lines) current += '\n';
        current += seg;
        current_has_lines = true;
    }
    flush();
    if (pages.size() > 1 && pages.back().text.empty()) pages.pop_back();
    return pages;
}

}  // namespace refbench
