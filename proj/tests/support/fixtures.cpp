#include "support/fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "refbench/schema.hpp"
#include "refbench/synthcorpus.hpp"
#include "refbench/pipeline.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace fixtures {

const std::vector<refbench::DocumentGold>& corpus() {
    static const std::vector<refbench::DocumentGold> docs =
        refbench::make_synthetic_corpus();
    return docs;
}

const std::vector<refbench::ReferenceGold>& references() {
    static const std::vector<refbench::ReferenceGold> refs =
        refbench::make_synthetic_references();
    return refs;
}

std::vector<refbench::ReferenceGold> make_refs(
    const std::vector<refbench::DocumentGold>& docs) {
    std::vector<refbench::ReferenceGold> refs;
    for (const auto& doc : docs) {
        for (size_t i = 0; i < doc.gold_strings.size(); ++i) {
            refbench::ReferenceGold ref;
            ref.ref_id = doc.doc_id + ":" + std::to_string(i + 1);
            ref.doc_id = doc.doc_id;
            ref.language = doc.language;
            ref.raw = doc.gold_strings[i];
            ref.record = doc.gold_records[i];
            refs.push_back(std::move(ref));
        }
    }
    return refs;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void append_person(std::string& xml, const char* tag, const std::string& name) {
    std::string surname = name, forename;
    size_t comma = name.find(", ");
    if (comma != std::string::npos) {
        surname = name.substr(0, comma);
        forename = name.substr(comma + 2);
    }
    xml += "<" + std::string(tag) + "><persName>";
    if (!forename.empty()) xml += "<forename>" + xml_escape(forename) + "</forename>";
    xml += "<surname>" + xml_escape(surname) + "</surname>";
    xml += "</persName></" + std::string(tag) + ">";
}

}  // namespace

std::string tei_from_records(const std::vector<refbench::ReferenceRecord>& records) {
    std::string xml =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<TEI xmlns=\"http://www.tei-c.org/ns/1.0\"><text><back><div><listBibl>\n";
    for (const auto& rec : records) {
        xml += "<biblStruct>";
        bool has_container = !rec.container_title.empty();
        if (has_container) {
            xml += "<analytic>";
            if (!rec.full_title.empty())
                xml += "<title level=\"a\">" + xml_escape(rec.full_title) + "</title>";
            for (const auto& a : rec.authors) append_person(xml, "author", a);
            xml += "</analytic>";
        }
        xml += "<monogr>";
        if (has_container) {
            xml += "<title level=\"j\">" + xml_escape(rec.container_title) + "</title>";
        } else if (!rec.full_title.empty()) {
            xml += "<title level=\"m\">" + xml_escape(rec.full_title) + "</title>";
        }
        if (!has_container)
            for (const auto& a : rec.authors) append_person(xml, "author", a);
        for (const auto& e : rec.editors) append_person(xml, "editor", e);
        xml += "<imprint>";
        if (!rec.year.empty()) xml += "<date when=\"" + xml_escape(rec.year) + "\" />";
        if (!rec.publisher.empty())
            xml += "<publisher>" + xml_escape(rec.publisher) + "</publisher>";
        if (!rec.place.empty()) xml += "<pubPlace>" + xml_escape(rec.place) + "</pubPlace>";
        if (!rec.volume.empty())
            xml += "<biblScope unit=\"volume\">" + xml_escape(rec.volume) + "</biblScope>";
        if (!rec.issue.empty())
            xml += "<biblScope unit=\"issue\">" + xml_escape(rec.issue) + "</biblScope>";
        if (!rec.pages.empty())
            xml += "<biblScope unit=\"page\">" + xml_escape(rec.pages) + "</biblScope>";
        xml += "</imprint></monogr>";
        if (!rec.doi.empty()) xml += "<idno type=\"DOI\">" + xml_escape(rec.doi) + "</idno>";
        xml += "</biblStruct>\n";
    }
    xml += "</listBibl></div></back></text></TEI>\n";
    return xml;
}

namespace {

struct OracleData {
    // (raw, record json text) in corpus order.
    std::vector<std::pair<std::string, std::string>> refs;
    std::map<std::string, std::string> record_by_raw;
    std::map<std::string, const refbench::DocumentGold*> doc_by_id;
};

std::string payload_of(const std::string& prompt) {
    size_t pos = prompt.rfind(refbench::kPayloadMarker);
    return pos == std::string::npos ? prompt
                                    : prompt.substr(pos + strlen(refbench::kPayloadMarker));
}

std::vector<size_t> contained_refs(const OracleData& data, const std::string& payload) {
    std::vector<std::pair<size_t, size_t>> found;  // (position, ref index)
    for (size_t i = 0; i < data.refs.size(); ++i) {
        size_t pos = payload.find(data.refs[i].first);
        if (pos != std::string::npos) found.emplace_back(pos, i);
    }
    std::sort(found.begin(), found.end());
    std::vector<size_t> out;
    for (const auto& [pos, idx] : found) out.push_back(idx);
    return out;
}

std::string chat_answer(const OracleData& data, const std::string& prompt) {
    std::string payload = payload_of(prompt);
    bool extract = prompt.find("verbatim reference strings") != std::string::npos;
    bool parse_single = prompt.find("the reference string below") != std::string::npos;

    if (parse_single) {
        std::string trimmed = payload;
        while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == ' '))
            trimmed.pop_back();
        auto it = data.record_by_raw.find(trimmed);
        if (it != data.record_by_raw.end()) return it->second;
        auto contained = contained_refs(data, payload);
        if (contained.size() == 1) return data.refs[contained[0]].second;
        return "{}";
    }
    auto contained = contained_refs(data, payload);
    json arr = json::array();
    for (size_t idx : contained) {
        if (extract)
            arr.push_back(data.refs[idx].first);
        else
            arr.push_back(json::parse(data.refs[idx].second));
    }
    return arr.dump();
}

std::shared_ptr<OracleData> make_oracle_data(
    const std::vector<refbench::DocumentGold>& docs) {
    auto data = std::make_shared<OracleData>();
    for (const auto& doc : docs) {
        data->doc_by_id[doc.doc_id] = &doc;
        for (size_t i = 0; i < doc.gold_strings.size(); ++i) {
            refbench::ReferenceRecord rec = doc.gold_records[i];
            rec.raw.reset();  // predictions carry schema fields only
            std::string record_json = refbench::record_to_json_text(rec);
            data->refs.emplace_back(doc.gold_strings[i], record_json);
            data->record_by_raw[doc.gold_strings[i]] = record_json;
        }
    }
    return data;
}

}  // namespace

std::string gold_chat_answer(const std::vector<refbench::DocumentGold>& docs,
                             const std::string& prompt) {
    return chat_answer(*make_oracle_data(docs), prompt);
}

std::string chat_envelope(const std::string& text) {
    json response = {{"choices", json::array({{{"message", {{"content", text}}}}})}};
    return response.dump();
}

GoldOracleServer::GoldOracleServer(const std::vector<refbench::DocumentGold>& docs)
    : server_(new httplib::Server) {
    auto data = make_oracle_data(docs);

    server_->Post("/v1/chat/completions",
                  [data](const httplib::Request& req, httplib::Response& res) {
                      json body = json::parse(req.body);
                      std::string prompt =
                          body.at("messages").at(0).at("content").get<std::string>();
                      res.set_content(chat_envelope(chat_answer(*data, prompt)),
                                      "application/json");
                  });

    server_->Post("/api/processCitationList",
                  [data](const httplib::Request& req, httplib::Response& res) {
                      std::vector<refbench::ReferenceRecord> records;
                      auto range = req.params.equal_range("citations");
                      for (auto it = range.first; it != range.second; ++it) {
                          auto rec = data->record_by_raw.find(it->second);
                          refbench::ReferenceRecord record;
                          if (rec != data->record_by_raw.end()) {
                              auto parsed = refbench::validate_record(rec->second);
                              record = std::get<refbench::ReferenceRecord>(parsed);
                          }
                          records.push_back(std::move(record));
                      }
                      res.set_content(tei_from_records(records), "application/xml");
                  });

    server_->Post("/api/processFulltextDocument",
                  [data](const httplib::Request& req, httplib::Response& res) {
                      std::string content;
                      if (req.has_file("input")) content = req.get_file_value("input").content;
                      size_t pos = content.find("doc_id=");
                      std::string doc_id;
                      if (pos != std::string::npos) {
                          size_t end = content.find_first_of("\r\n ", pos + 7);
                          doc_id = content.substr(pos + 7, end - pos - 7);
                      }
                      auto it = data->doc_by_id.find(doc_id);
                      if (it == data->doc_by_id.end()) {
                          res.status = 404;
                          return;
                      }
                      std::vector<refbench::ReferenceRecord> recs;
                      for (auto rec : it->second->gold_records) {
                          rec.raw.reset();
                          recs.push_back(std::move(rec));
                      }
                      res.set_content(tei_from_records(recs), "application/xml");
                  });

    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this]() { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

GoldOracleServer::~GoldOracleServer() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string GoldOracleServer::url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
}

TestHttpServer::TestHttpServer(std::function<void(httplib::Server&)> setup)
    : server_(new httplib::Server) {
    setup(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this]() { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

TestHttpServer::~TestHttpServer() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string TestHttpServer::url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
}

refbench::BackendProfile chat_profile(const std::string& name, const std::string& url) {
    refbench::BackendProfile p;
    p.name = name;
    p.kind = refbench::BackendKind::chat_llm;
    p.endpoint = url;
    p.gen.model_id = "fixture-model";
    p.timeout_s = 10.0;
    p.transport_retries = 2;
    return p;
}

refbench::BackendProfile record_profile(const std::string& name, const std::string& url,
                                        const std::string& cache_dir) {
    refbench::BackendProfile p = chat_profile(name, url);
    p.mode = refbench::BackendMode::record;
    p.cache_dir = cache_dir;
    return p;
}

refbench::BackendProfile replay_profile(const std::string& name,
                                        const std::string& cache_dir) {
    refbench::BackendProfile p;
    p.name = name;
    p.kind = refbench::BackendKind::replay;
    p.cache_dir = cache_dir;
    return p;
}

refbench::BackendProfile grobid_profile(const std::string& name, const std::string& url) {
    refbench::BackendProfile p;
    p.name = name;
    p.kind = refbench::BackendKind::grobid;
    p.endpoint = url;
    p.timeout_s = 10.0;
    p.transport_retries = 2;
    return p;
}

refbench::BackendProfile stub_embedder_profile() {
    refbench::BackendProfile p;
    p.name = "stub-embedder";
    p.kind = refbench::BackendKind::embedding;
    p.endpoint = "stub://bibfeatures";
    return p;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = (fs::temp_directory_path() /
             ("refbench_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1))))
                .string();
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
    return (fs::path(path_) / name).string();
}

std::vector<refbench::DocumentGold> corpus_with_fake_pdfs(const TempDir& dir) {
    std::vector<refbench::DocumentGold> docs = corpus();
    for (auto& doc : docs) {
        std::string path = dir.file(doc.doc_id + ".pdf");
        std::ofstream out(path, std::ios::binary);
        out << "%PDF-1.4\n% refbench fixture\ndoc_id=" << doc.doc_id << "\n";
        doc.pdf_path = path;
    }
    return docs;
}

}  // namespace fixtures
