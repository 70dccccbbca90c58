#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refbench/schema.hpp"

namespace refbench {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AuthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A replay-mode cache miss; replay runs never fall back to the network.
struct ReplayMiss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenParams {
    double temperature = 0.0;
    double top_p = 1.0;
    std::optional<long> max_output_tokens;
    std::string model_id;
};

enum class BackendKind { chat_llm, grobid, embedding, replay };

const char* backend_kind_name(BackendKind k);
std::optional<BackendKind> backend_kind_from_name(const std::string& name);

enum class BackendMode { live, record, replay };

struct BackendProfile {
    std::string name;
    BackendKind kind = BackendKind::chat_llm;
    std::string endpoint;   // base URL; "stub://bibfeatures" selects the offline embedder
    std::string auth_env;   // env var holding the API key; never stored resolved
    GenParams gen;
    double timeout_s = 120.0;
    int max_inflight = 4;
    int transport_retries = 3;
    BackendMode mode = BackendMode::live;
    std::string cache_dir;  // record/replay storage
    long context_budget_tokens = 128000;
};

// Content address for one request against one profile.
std::string replay_key(const std::string& profile_name, const std::string& payload);

void replay_store(const std::string& cache_dir, const std::string& key,
                  const std::string& op, const std::string& payload,
                  const std::string& response);

// Throws ReplayMiss naming the key when nothing was recorded.
std::string replay_lookup(const std::string& cache_dir, const std::string& key);

// Client handle for one backend profile: chat completions, embeddings and
// the two GROBID endpoints, with transparent record/replay. Safe for
// concurrent calls up to max_inflight.
class Backend {
public:
    explicit Backend(BackendProfile profile);
    ~Backend();

    const BackendProfile& profile() const { return profile_; }

    // Raw model text for a chat prompt. Transport problems (timeouts,
    // HTTP >= 500, rate-limit exhaustion after bounded backoff) come back
    // as transport_error; JSON validation and the semantic retry live in
    // the pipeline.
    Fallible<std::string> complete(const std::string& prompt);

    // One L2-normalized vector per text. A non-empty instruction marks the
    // texts as queries and prepends the instruction-embedding wrapper.
    Fallible<std::vector<std::vector<double>>> embed(const std::vector<std::string>& texts,
                                                     const std::string& instruction);

    Fallible<std::string> grobid_parse_citations(const std::vector<std::string>& strings);
    Fallible<std::string> grobid_process_fulltext(const std::string& pdf_bytes);

    struct Impl;

private:
    BackendProfile profile_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace refbench
