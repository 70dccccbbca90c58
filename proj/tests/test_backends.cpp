#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "refbench/backends.hpp"
#include "refbench/corpus.hpp"
#include "support/fixtures.hpp"

using namespace refbench;
using nlohmann::json;

namespace {

std::string chat_body(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"content", content}}}}})}}.dump();
}

}  // namespace

TEST_CASE("replay_store / replay_lookup round-trip") {
    fixtures::TempDir dir("replay");
    std::string key = replay_key("profile", "prompt text");
    replay_store(dir.path(), key, "complete", "prompt text", "the answer\nline two");
    CHECK(replay_lookup(dir.path(), key) == "the answer\nline two");

    std::string other = replay_key("profile", "different prompt");
    CHECK(other != key);
    CHECK_THROWS_AS(replay_lookup(dir.path(), other), ReplayMiss);
    try {
        replay_lookup(dir.path(), other);
    } catch (const ReplayMiss& ex) {
        CHECK(std::string(ex.what()).find(other) != std::string::npos);
    }
}

TEST_CASE("replay keys separate profiles") {
    CHECK(replay_key("a", "x") != replay_key("b", "x"));
}

TEST_CASE("complete: success, transport failures and auth") {
    std::atomic<int> hits{0};
    std::atomic<int> mode{0};  // 0 ok, 1 http 500, 2 http 413, 3 http 401
    fixtures::TestHttpServer server([&](httplib::Server& s) {
        s.Post("/v1/chat/completions",
               [&](const httplib::Request& req, httplib::Response& res) {
                   ++hits;
                   switch (mode.load()) {
                       case 0: {
                           json body = json::parse(req.body);
                           CHECK(body["model"] == "fixture-model");
                           res.set_content(chat_body("hello"), "application/json");
                           break;
                       }
                       case 1:
                           res.status = 500;
                           break;
                       case 2:
                           res.status = 413;
                           res.set_content("payload exceeds provider limit", "text/plain");
                           break;
                       case 3:
                           res.status = 401;
                           break;
                   }
               });
    });

    Backend backend(fixtures::chat_profile("t", server.url()));

    SUBCASE("valid response returns the model text") {
        auto out = backend.complete("say hello");
        REQUIRE(!is_failure(out));
        CHECK(std::get<std::string>(out) == "hello");
        CHECK(hits == 1);
    }
    SUBCASE("HTTP 500 retries then surfaces transport_error") {
        mode = 1;
        auto out = backend.complete("x");
        REQUIRE(is_failure(out));
        CHECK(std::get<StructuralFailure>(out).kind == FailureKind::transport_error);
        CHECK(hits == 2);  // profile transport_retries = 2
    }
    SUBCASE("client-side rejection is not retried and keeps the message") {
        mode = 2;
        auto out = backend.complete("very long prompt");
        REQUIRE(is_failure(out));
        const auto& f = std::get<StructuralFailure>(out);
        CHECK(f.kind == FailureKind::transport_error);
        CHECK(f.raw_output.find("provider limit") != std::string::npos);
        CHECK(hits == 1);
    }
    SUBCASE("HTTP 401 raises AuthError") {
        mode = 3;
        CHECK_THROWS_AS((void)backend.complete("x"), AuthError);
    }
}

TEST_CASE("unreachable endpoint is a transport error") {
    auto profile = fixtures::chat_profile("dead", "http://127.0.0.1:9");
    profile.timeout_s = 1.0;
    profile.transport_retries = 1;
    Backend backend(profile);
    auto out = backend.complete("x");
    REQUIRE(is_failure(out));
    CHECK(std::get<StructuralFailure>(out).kind == FailureKind::transport_error);
}

TEST_CASE("auth env variable is required when configured") {
    ::unsetenv("REFBENCH_MISSING_KEY");
    auto profile = fixtures::chat_profile("auth", "http://127.0.0.1:9");
    profile.auth_env = "REFBENCH_MISSING_KEY";
    CHECK_THROWS_AS(Backend{profile}, AuthError);
    ::setenv("REFBENCH_MISSING_KEY", "value", 1);
    CHECK_NOTHROW(Backend{profile});
    ::unsetenv("REFBENCH_MISSING_KEY");
}

TEST_CASE("record then replay returns byte-exact output, fully offline") {
    fixtures::TempDir dir("cache");
    {
        // The server only exists for the recording pass.
        fixtures::TestHttpServer server([&](httplib::Server& s) {
            s.Post("/v1/chat/completions",
                   [](const httplib::Request&, httplib::Response& res) {
                       res.set_content(chat_body("recorded éß text"),
                                       "application/json");
                   });
        });
        Backend rec(fixtures::record_profile("p", server.url(), dir.path()));
        auto out = rec.complete("the prompt");
        REQUIRE(!is_failure(out));
        CHECK(std::get<std::string>(out) == "recorded éß text");
    }
    Backend rep(fixtures::replay_profile("p", dir.path()));
    auto out = rep.complete("the prompt");
    REQUIRE(!is_failure(out));
    CHECK(std::get<std::string>(out) == "recorded éß text");

    CHECK_THROWS_AS((void)rep.complete("never recorded"), ReplayMiss);
}

TEST_CASE("stub embedder is deterministic and unit-norm") {
    Backend embedder(fixtures::stub_embedder_profile());
    auto out = embedder.embed({"abc", "abc", "Journal of X, 12(3), pp. 10-22, 1998."}, "");
    REQUIRE(!is_failure(out));
    const auto& vecs = std::get<std::vector<std::vector<double>>>(out);
    REQUIRE(vecs.size() == 3);
    CHECK(vecs[0] == vecs[1]);
    for (const auto& v : vecs) {
        REQUIRE(v.size() == vecs[0].size());
        double norm = 0.0;
        for (double x : v) norm += x * x;
        CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-6);
    }

    auto again = embedder.embed({"abc"}, "");
    CHECK(std::get<std::vector<std::vector<double>>>(again)[0] == vecs[0]);
}

TEST_CASE("embedding client parses the service response and normalizes") {
    fixtures::TestHttpServer server([&](httplib::Server& s) {
        s.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            json data = json::array();
            for (size_t i = 0; i < body["input"].size(); ++i)
                data.push_back({{"index", i}, {"embedding", {3.0, 4.0}}});
            res.set_content(json{{"data", data}}.dump(), "application/json");
        });
    });
    auto profile = fixtures::stub_embedder_profile();
    profile.endpoint = server.url();
    Backend backend(profile);
    auto out = backend.embed({"a", "b"}, "");
    REQUIRE(!is_failure(out));
    const auto& vecs = std::get<std::vector<std::vector<double>>>(out);
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[0][0] == doctest::Approx(0.6));
    CHECK(vecs[0][1] == doctest::Approx(0.8));
}

TEST_CASE("ragged embedding batches are a dimension mismatch") {
    fixtures::TestHttpServer server([&](httplib::Server& s) {
        s.Post("/v1/embeddings", [](const httplib::Request&, httplib::Response& res) {
            json data = json::array();
            data.push_back({{"index", 0}, {"embedding", {1.0, 0.0}}});
            data.push_back({{"index", 1}, {"embedding", {1.0, 0.0, 0.0}}});
            res.set_content(json{{"data", data}}.dump(), "application/json");
        });
    });
    auto profile = fixtures::stub_embedder_profile();
    profile.endpoint = server.url();
    Backend backend(profile);
    auto out = backend.embed({"a", "b"}, "");
    REQUIRE(is_failure(out));
    CHECK(std::get<StructuralFailure>(out).detail.find("dimension_mismatch") !=
          std::string::npos);
}

TEST_CASE("grobid_parse_citations posts the form contract") {
    std::vector<std::string> received;
    fixtures::TestHttpServer server([&](httplib::Server& s) {
        s.Post("/api/processCitationList",
               [&](const httplib::Request& req, httplib::Response& res) {
                   auto range = req.params.equal_range("citations");
                   for (auto it = range.first; it != range.second; ++it)
                       received.push_back(it->second);
                   res.set_content("<TEI><listBibl><biblStruct><monogr><title>T</title>"
                                   "</monogr></biblStruct></listBibl></TEI>",
                                   "application/xml");
               });
    });
    Backend backend(fixtures::grobid_profile("g", server.url()));
    auto out = backend.grobid_parse_citations({"Ref one.", "Ref two."});
    REQUIRE(!is_failure(out));
    CHECK(received == std::vector<std::string>{"Ref one.", "Ref two."});
    CHECK(std::get<std::string>(out).find("listBibl") != std::string::npos);

    CHECK_THROWS_AS((void)backend.grobid_parse_citations({}), ConfigError);
}

TEST_CASE("grobid server errors carry the status") {
    fixtures::TestHttpServer server([&](httplib::Server& s) {
        s.Post("/api/processCitationList",
               [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    });
    Backend backend(fixtures::grobid_profile("g", server.url()));
    auto out = backend.grobid_parse_citations({"x"});
    REQUIRE(is_failure(out));
    CHECK(std::get<StructuralFailure>(out).detail.find("503") != std::string::npos);
}

TEST_CASE("grobid_process_fulltext") {
    SUBCASE("zero-byte input is rejected client-side") {
        Backend backend(fixtures::grobid_profile("g", "http://127.0.0.1:9"));
        auto out = backend.grobid_process_fulltext("");
        REQUIRE(is_failure(out));
        CHECK(std::get<StructuralFailure>(out).detail.find("pdf_rejected") !=
              std::string::npos);
    }
    SUBCASE("pdf bytes go out as multipart and TEI comes back") {
        std::string got_name, got_content;
        fixtures::TestHttpServer server([&](httplib::Server& s) {
            s.Post("/api/processFulltextDocument",
                   [&](const httplib::Request& req, httplib::Response& res) {
                       REQUIRE(req.has_file("input"));
                       auto file = req.get_file_value("input");
                       got_name = file.filename;
                       got_content = file.content;
                       res.set_content("<TEI><listBibl/></TEI>", "application/xml");
                   });
        });
        Backend backend(fixtures::grobid_profile("g", server.url()));
        auto out = backend.grobid_process_fulltext("%PDF-1.4 fake");
        REQUIRE(!is_failure(out));
        CHECK(got_name == "input.pdf");
        CHECK(got_content == "%PDF-1.4 fake");
    }
}
