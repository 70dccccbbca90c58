#pragma once

#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "refbench/backends.hpp"
#include "refbench/corpus.hpp"

namespace httplib {
class Server;
}

namespace fixtures {

// The bundled synthetic corpus, built once per process.
const std::vector<refbench::DocumentGold>& corpus();
const std::vector<refbench::ReferenceGold>& references();

// Reference-level gold derived from a (possibly modified) corpus copy.
std::vector<refbench::ReferenceGold> make_refs(
    const std::vector<refbench::DocumentGold>& docs);

// Serializes records back into GROBID-model TEI; import_tei inverts it.
std::string tei_from_records(const std::vector<refbench::ReferenceRecord>& records);

// The gold-faithful model answer for one prompt (the logic behind
// GoldOracleServer's chat route), and the chat-completions envelope.
std::string gold_chat_answer(const std::vector<refbench::DocumentGold>& docs,
                             const std::string& prompt);
std::string chat_envelope(const std::string& text);

// In-process HTTP server with gold-faithful answers for chat completions
// and the two GROBID endpoints. Payloads are matched by scanning for
// verbatim gold strings after the prompt's payload marker.
class GoldOracleServer {
public:
    explicit GoldOracleServer(const std::vector<refbench::DocumentGold>& docs);
    ~GoldOracleServer();
    std::string url() const;

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

// Minimal wrapper for ad-hoc test servers.
class TestHttpServer {
public:
    explicit TestHttpServer(std::function<void(httplib::Server&)> setup);
    ~TestHttpServer();
    std::string url() const;

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

refbench::BackendProfile chat_profile(const std::string& name, const std::string& url);
refbench::BackendProfile record_profile(const std::string& name, const std::string& url,
                                        const std::string& cache_dir);
refbench::BackendProfile replay_profile(const std::string& name,
                                        const std::string& cache_dir);
refbench::BackendProfile grobid_profile(const std::string& name, const std::string& url);
refbench::BackendProfile stub_embedder_profile();

// A scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const;

private:
    std::string path_;
};

// Copies the corpus and points each document at a synthetic PDF whose
// bytes name the document (for the GROBID fulltext route).
std::vector<refbench::DocumentGold> corpus_with_fake_pdfs(const TempDir& dir);

}  // namespace fixtures
