#include "refbench/backends.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "refbench/corpus.hpp"
#include "refbench/util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace refbench {

const char* backend_kind_name(BackendKind k) {
    switch (k) {
        case BackendKind::chat_llm: return "chat_llm";
        case BackendKind::grobid: return "grobid";
        case BackendKind::embedding: return "embedding";
        case BackendKind::replay: return "replay";
    }
    return "unknown";
}

std::optional<BackendKind> backend_kind_from_name(const std::string& name) {
    for (BackendKind k : {BackendKind::chat_llm, BackendKind::grobid,
                          BackendKind::embedding, BackendKind::replay})
        if (name == backend_kind_name(k)) return k;
    return std::nullopt;
}

std::string replay_key(const std::string& profile_name, const std::string& payload) {
    return sha256_hex(profile_name + "\n" + payload);
}

namespace {

bool is_valid_utf8(const std::string& s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char b = s[i];
        int len = b < 0x80 ? 1 : (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3
                  : (b & 0xF8) == 0xF0 ? 4 : 0;
        if (len == 0 || i + len > s.size()) return false;
        for (int k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        i += len;
    }
    return true;
}

fs::path cache_file(const std::string& cache_dir, const std::string& key) {
    return fs::path(cache_dir) / (key + ".json");
}

StructuralFailure transport_failure(std::string detail, const std::string& raw = "") {
    StructuralFailure f;
    f.kind = FailureKind::transport_error;
    f.detail = std::move(detail);
    f.raw_output = raw;
    return f;
}

// Splits "http://host:port/base" into origin and path prefix.
void split_endpoint(const std::string& endpoint, std::string& origin, std::string& base) {
    size_t scheme = endpoint.find("://");
    size_t path = scheme == std::string::npos ? endpoint.find('/')
                                              : endpoint.find('/', scheme + 3);
    if (path == std::string::npos) {
        origin = endpoint;
        base = "";
    } else {
        origin = endpoint.substr(0, path);
        base = endpoint.substr(path);
        while (!base.empty() && base.back() == '/') base.pop_back();
    }
}

// Deterministic offline embedder: a handful of bibliographic surface
// features plus trigram hash buckets. Queries (instruction-wrapped texts)
// map to the feature probe so reference-bearing chunks rank high.
constexpr int kStubDim = 16;

std::vector<double> stub_vector(const std::string& text, bool is_query) {
    std::vector<double> v(kStubDim, 0.0);
    if (is_query) {
        for (int i = 0; i < 6; ++i) v[i] = 1.0;
        return v;
    }
    double chars = std::max<size_t>(text.size(), 1);
    size_t years = 0, commas = 0, markers = 0, quotes = 0;
    for (size_t i = 0; i + 3 < text.size(); ++i) {
        if ((text[i] == '1' || text[i] == '2') && isdigit(text[i + 1]) &&
            isdigit(text[i + 2]) && isdigit(text[i + 3]))
            ++years;
    }
    for (char c : text) {
        if (c == ',') ++commas;
        if (c == '"' || c == '\'') ++quotes;
    }
    for (const char* m : {"pp.", "S.", "vol", "no.", "ed.", "In:", "[^"}) {
        size_t pos = 0;
        while ((pos = text.find(m, pos)) != std::string::npos) {
            ++markers;
            pos += 1;
        }
    }
    size_t ref_lines = 0, lines = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + start, end - start);
        if (!line.empty()) {
            ++lines;
            if (line[0] == '[' || line.substr(0, 2) == "- " ||
                line.find("19") != std::string_view::npos ||
                line.find("20") != std::string_view::npos)
                ++ref_lines;
        }
        if (end == text.size()) break;
        start = end + 1;
    }
    v[0] = 100.0 * years / chars;
    v[1] = 10.0 * commas / chars;
    v[2] = lines ? static_cast<double>(ref_lines) / lines : 0.0;
    v[3] = 100.0 * markers / chars;
    v[4] = 10.0 * quotes / chars;
    v[5] = years > 0 ? 1.0 : 0.0;
    // Trigram buckets carry textual identity at low weight. FNV-1a keeps
    // the vectors stable across platforms and standard libraries.
    for (size_t i = 0; i + 2 < text.size(); ++i) {
        uint64_t h = 1469598103934665603ULL;
        for (int k = 0; k < 3; ++k) {
            h ^= static_cast<unsigned char>(text[i + k]);
            h *= 1099511628211ULL;
        }
        v[6 + h % (kStubDim - 6)] += 0.001;
    }
    return v;
}

void l2_normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (double& x : v) x /= norm;
}

}  // namespace

void replay_store(const std::string& cache_dir, const std::string& key,
                  const std::string& op, const std::string& payload,
                  const std::string& response) {
    json entry = {{"op", op}, {"response", response}};
    if (is_valid_utf8(payload))
        entry["payload"] = payload;
    else
        entry["payload_bytes"] = payload.size();
    atomic_write_file(cache_file(cache_dir, key).string(), entry.dump(2) + "\n");
}

std::string replay_lookup(const std::string& cache_dir, const std::string& key) {
    auto text = read_file_if_exists(cache_file(cache_dir, key).string());
    if (!text) throw ReplayMiss("no recorded response for key " + key);
    json entry = json::parse(*text);
    return entry.at("response").get<std::string>();
}

struct Backend::Impl {
    std::mutex mu;
    std::condition_variable cv;
    int in_flight = 0;
    std::mt19937 jitter{std::random_device{}()};

    struct Slot {
        Impl& impl;
        explicit Slot(Impl& i, int limit) : impl(i) {
            std::unique_lock lock(impl.mu);
            impl.cv.wait(lock, [&] { return impl.in_flight < limit; });
            ++impl.in_flight;
        }
        ~Slot() {
            {
                std::lock_guard lock(impl.mu);
                --impl.in_flight;
            }
            impl.cv.notify_one();
        }
    };

    double jitter_factor() {
        std::lock_guard lock(mu);
        return std::uniform_real_distribution<double>(0.5, 1.5)(jitter);
    }
};

Backend::Backend(BackendProfile profile) : profile_(std::move(profile)), impl_(new Impl) {
    if (profile_.kind == BackendKind::replay || profile_.mode == BackendMode::replay) {
        if (profile_.cache_dir.empty())
            throw ConfigError("profile \"" + profile_.name + "\": replay needs cache_dir");
    } else if (profile_.endpoint.empty()) {
        throw ConfigError("profile \"" + profile_.name + "\": endpoint missing");
    }
    if (profile_.mode == BackendMode::record && profile_.cache_dir.empty())
        throw ConfigError("profile \"" + profile_.name + "\": record needs cache_dir");
    if (!profile_.auth_env.empty() && profile_.mode != BackendMode::replay &&
        profile_.kind != BackendKind::replay && getenv_or(profile_.auth_env.c_str()).empty())
        throw AuthError("environment variable " + profile_.auth_env + " is not set");
}

Backend::~Backend() = default;

namespace {

struct HttpResult {
    bool ok = false;
    int status = 0;
    std::string body;
    std::string error;  // connection-level failure
};

bool retryable(const HttpResult& r) {
    if (!r.ok) return true;  // connection error / timeout
    return r.status >= 500 || r.status == 429 || r.status == 408;
}

}  // namespace

// Shared transport wrapper: replay short-circuit, bounded retry with
// jittered backoff, record-through on success.
template <typename DoRequest>
static Fallible<std::string> transport_call(const BackendProfile& profile,
                                            Backend::Impl& impl, const std::string& op,
                                            const std::string& payload,
                                            DoRequest&& do_request) {
    const bool replaying =
        profile.kind == BackendKind::replay || profile.mode == BackendMode::replay;
    const std::string key = replay_key(profile.name, payload);
    if (replaying) return replay_lookup(profile.cache_dir, key);

    Backend::Impl::Slot slot(impl, std::max(profile.max_inflight, 1));
    HttpResult last;
    int attempts = std::max(profile.transport_retries, 1);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            double delay = 0.25 * (1 << (attempt - 1)) * impl.jitter_factor();
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        last = do_request();
        if (last.ok && last.status >= 200 && last.status < 300) {
            if (profile.mode == BackendMode::record)
                replay_store(profile.cache_dir, key, op, payload, last.body);
            return last.body;
        }
        if (last.ok && (last.status == 401 || last.status == 403))
            throw AuthError("HTTP " + std::to_string(last.status) + " from " +
                            profile.endpoint);
        if (!retryable(last)) break;
    }
    std::string detail = last.ok ? op + " failed with HTTP " + std::to_string(last.status)
                                 : op + " failed: " + last.error;
    return transport_failure(detail, last.body);
}

namespace {

httplib::Client make_client(const std::string& origin, double timeout_s) {
    httplib::Client cli(origin);
    cli.set_connection_timeout(std::chrono::duration<double>(timeout_s));
    cli.set_read_timeout(std::chrono::duration<double>(timeout_s));
    cli.set_write_timeout(std::chrono::duration<double>(timeout_s));
    return cli;
}

HttpResult to_result(const httplib::Result& res) {
    HttpResult out;
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.ok = true;
    out.status = res->status;
    out.body = res->body;
    return out;
}

}  // namespace

Fallible<std::string> Backend::complete(const std::string& prompt) {
    if (profile_.kind != BackendKind::chat_llm && profile_.kind != BackendKind::replay)
        throw ConfigError("profile \"" + profile_.name + "\" cannot serve chat prompts");

    auto raw = transport_call(profile_, *impl_, "complete", prompt, [&]() {
        std::string origin, base;
        split_endpoint(profile_.endpoint, origin, base);
        auto cli = make_client(origin, profile_.timeout_s);
        std::string key = getenv_or(profile_.auth_env.empty() ? "" : profile_.auth_env.c_str());
        httplib::Headers headers;
        if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
        json body = {
            {"model", profile_.gen.model_id},
            {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
            {"temperature", profile_.gen.temperature},
            {"top_p", profile_.gen.top_p},
        };
        if (profile_.gen.max_output_tokens) body["max_tokens"] = *profile_.gen.max_output_tokens;
        return to_result(cli.Post(base + "/v1/chat/completions", headers, body.dump(),
                                  "application/json"));
    });
    if (is_failure(raw)) return std::get<StructuralFailure>(raw);

    // In replay the recorded value is already the model text.
    const std::string& body = std::get<std::string>(raw);
    if (profile_.kind == BackendKind::replay || profile_.mode == BackendMode::replay)
        return body;
    try {
        json parsed = json::parse(body);
        std::string text = parsed.at("choices").at(0).at("message").at("content")
                               .get<std::string>();
        if (profile_.mode == BackendMode::record) {
            // Re-store just the model text so replay returns it byte-exact.
            replay_store(profile_.cache_dir, replay_key(profile_.name, prompt), "complete",
                         prompt, text);
        }
        return text;
    } catch (const json::exception& ex) {
        return transport_failure(std::string("malformed chat response: ") + ex.what(), body);
    }
}

Fallible<std::vector<std::vector<double>>> Backend::embed(
    const std::vector<std::string>& texts, const std::string& instruction) {
    if (profile_.kind != BackendKind::embedding && profile_.kind != BackendKind::replay)
        throw ConfigError("profile \"" + profile_.name + "\" cannot serve embeddings");

    std::vector<std::string> inputs;
    inputs.reserve(texts.size());
    for (const auto& t : texts)
        inputs.push_back(instruction.empty() ? t
                                             : "Instruct: " + instruction + "\nQuery: " + t);

    if (profile_.endpoint.rfind("stub:", 0) == 0 && profile_.kind != BackendKind::replay) {
        std::vector<std::vector<double>> out;
        for (const auto& input : inputs) {
            auto v = stub_vector(input, input.rfind("Instruct: ", 0) == 0);
            l2_normalize(v);
            out.push_back(std::move(v));
        }
        return out;
    }

    std::string payload;
    for (const auto& input : inputs) payload += input + "\x1e";
    auto raw = transport_call(profile_, *impl_, "embed", payload, [&]() {
        std::string origin, base;
        split_endpoint(profile_.endpoint, origin, base);
        auto cli = make_client(origin, profile_.timeout_s);
        std::string key = getenv_or(profile_.auth_env.empty() ? "" : profile_.auth_env.c_str());
        httplib::Headers headers;
        if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
        json body = {{"model", profile_.gen.model_id}, {"input", inputs}};
        return to_result(cli.Post(base + "/v1/embeddings", headers, body.dump(),
                                  "application/json"));
    });
    if (is_failure(raw)) return std::get<StructuralFailure>(raw);

    try {
        json parsed = json::parse(std::get<std::string>(raw));
        const json& data = parsed.at("data");
        std::vector<std::vector<double>> out(data.size());
        size_t fallback_index = 0;
        for (const auto& item : data) {
            size_t index = item.contains("index") ? item["index"].get<size_t>()
                                                  : fallback_index;
            ++fallback_index;
            if (index >= out.size()) throw std::out_of_range("embedding index");
            out[index] = item.at("embedding").get<std::vector<double>>();
        }
        if (out.size() != inputs.size())
            return transport_failure("dimension_mismatch: got " +
                                     std::to_string(out.size()) + " vectors for " +
                                     std::to_string(inputs.size()) + " inputs");
        size_t dim = out.empty() ? 0 : out[0].size();
        for (auto& v : out) {
            if (v.size() != dim)
                return transport_failure("dimension_mismatch: ragged embedding batch");
            l2_normalize(v);
        }
        return out;
    } catch (const std::exception& ex) {
        return transport_failure(std::string("malformed embedding response: ") + ex.what());
    }
}

Fallible<std::string> Backend::grobid_parse_citations(const std::vector<std::string>& strings) {
    if (profile_.kind != BackendKind::grobid && profile_.kind != BackendKind::replay)
        throw ConfigError("profile \"" + profile_.name + "\" cannot serve GROBID calls");
    if (strings.empty())
        throw ConfigError("grobid_parse_citations requires a non-empty citation list");

    std::string payload;
    for (const auto& s : strings) payload += s + "\x1e";
    return transport_call(profile_, *impl_, "processCitationList", payload, [&]() {
        std::string origin, base;
        split_endpoint(profile_.endpoint, origin, base);
        auto cli = make_client(origin, profile_.timeout_s);
        httplib::Params params;
        for (const auto& s : strings) params.emplace("citations", s);
        return to_result(cli.Post(base + "/api/processCitationList", params));
    });
}

Fallible<std::string> Backend::grobid_process_fulltext(const std::string& pdf_bytes) {
    if (profile_.kind != BackendKind::grobid && profile_.kind != BackendKind::replay)
        throw ConfigError("profile \"" + profile_.name + "\" cannot serve GROBID calls");
    if (pdf_bytes.empty()) {
        StructuralFailure f = transport_failure("pdf_rejected: empty input");
        return f;
    }

    return transport_call(profile_, *impl_, "processFulltextDocument", pdf_bytes, [&]() {
        std::string origin, base;
        split_endpoint(profile_.endpoint, origin, base);
        auto cli = make_client(origin, profile_.timeout_s);
        httplib::MultipartFormDataItems items = {
            {"input", pdf_bytes, "input.pdf", "application/pdf"},
        };
        return to_result(cli.Post(base + "/api/processFulltextDocument", items));
    });
}

}  // namespace refbench
