#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "tstok/dataset.hpp"
#include "tstok/errors.hpp"
#include "tstok/generator.hpp"
#include "tstok/prompts.hpp"

using namespace tstok;

namespace {

GenerationJob job_of(const std::string& template_id, std::uint64_t seed = 1) {
    GenerationJob job;
    job.template_id = template_id;
    job.system_text = "irrelevant for scripted output";
    job.metadata = {{"length", "64"}, {"channels", "2"}};
    job.seed = seed;
    return job;
}

std::filesystem::path temp_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("scripted output is deterministic and parseable") {
    auto transport = make_scripted_transport();
    for (const char* id : {"general_reasoning", "classification", "decision_making", "math_reasoning"}) {
        auto a = transport->generate(job_of(id));
        auto b = transport->generate(job_of(id));
        CHECK(a == b);
        auto turns = parse_conversation(a);
        CHECK(turns.size() == 2);
        CHECK(turns[0].content.find("[user-input]") != std::string::npos);
    }
    auto qa_raw = transport->generate(job_of("qa"));
    auto qa = parse_qa(qa_raw);
    CHECK(qa.correct == 'D'); // generation directive: D holds the right answer
    CHECK(qa.options.size() == 4);

    CHECK(transport->generate(job_of("qa", 1)) != transport->generate(job_of("qa", 2)));
}

TEST_CASE("record then replay returns byte-identical text") {
    auto dir = temp_dir("tstok-fixtures-test");
    auto recording = make_recording_transport(make_scripted_transport(), dir.string());
    auto job = job_of("general_reasoning", 9);
    auto live_text = recording->generate(job);

    auto replay = make_replay_transport(dir.string());
    CHECK(replay->generate(job) == live_text);

    auto other = job_of("general_reasoning", 10);
    CHECK_THROWS_WITH_AS(replay->generate(other), doctest::Contains("FixtureMiss"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("fixture fingerprints track the job identity") {
    auto a = job_of("qa", 5);
    auto b = job_of("qa", 5);
    CHECK(a.fingerprint() == b.fingerprint());
    b.seed = 6;
    CHECK(a.fingerprint() != b.fingerprint());
    b = a;
    b.metadata["length"] = "65";
    CHECK(a.fingerprint() != b.fingerprint());
    b = a;
    b.plot_path = "different.png"; // plot bytes excluded from identity
    CHECK(a.fingerprint() == b.fingerprint());
}

TEST_CASE("live transport fails fast without credentials") {
    unsetenv("TSTOK_API_KEY");
    auto transport = make_http_transport(HttpTransportConfig{});
    CHECK_THROWS_WITH_AS(transport->generate(job_of("qa")), doctest::Contains("auth"), Error);
}

TEST_CASE("live transport retries transient failures and parses the reply") {
    httplib::Server server;
    std::atomic<int> calls{0};
    std::string seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        int n = ++calls;
        seen_auth = req.get_header_value("Authorization");
        if (n <= 2) {
            res.status = 500;
            return;
        }
        nlohmann::json reply{
            {"choices",
             nlohmann::json::array({nlohmann::json{{"message", {{"role", "assistant"}, {"content", "live reply"}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("TSTOK_API_KEY", "test-key", 1);
    HttpTransportConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(port);
    auto transport = make_http_transport(config);
    CHECK(transport->generate(job_of("qa")) == "live reply");
    CHECK(calls == 3);
    CHECK(seen_auth == "Bearer test-key");

    server.stop();
    listener.join();
    unsetenv("TSTOK_API_KEY");
}

TEST_CASE("live transport treats 4xx as fatal, not retryable") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 400;
        res.set_content("{\"error\":\"bad request\"}", "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("TSTOK_API_KEY", "test-key", 1);
    HttpTransportConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(port);
    auto transport = make_http_transport(config);
    CHECK_THROWS_WITH_AS(transport->generate(job_of("qa")), doctest::Contains("status 400"), Error);
    CHECK(calls == 1);

    server.stop();
    listener.join();
    unsetenv("TSTOK_API_KEY");
}

TEST_CASE("bounded-parallel runner keeps input order") {
    auto transport = make_scripted_transport();
    std::vector<GenerationJob> jobs;
    for (std::uint64_t i = 0; i < 24; ++i) jobs.push_back(job_of("general_reasoning", i));
    auto serial = run_generation_jobs(jobs, *transport, 1);
    auto parallel = run_generation_jobs(jobs, *transport, 8);
    CHECK(serial == parallel);
}

TEST_CASE("prompt templates interpolate metadata") {
    auto bundle = assemble_prompt(TSTOK_DATA_DIR "/templates", "general_reasoning",
                                  {{"length", "64"}, {"channels", "2"}}, "plot.png");
    CHECK(bundle.system_text.find("64") != std::string::npos);
    CHECK(bundle.system_text.find("{length}") == std::string::npos);
    CHECK(bundle.plot_path == "plot.png");

    auto qa = assemble_prompt(TSTOK_DATA_DIR "/templates", "qa", {{"length", "10"}, {"channels", "1"}}, "");
    CHECK(qa.system_text.find("The letter D should be the correct answer") != std::string::npos);

    CHECK_THROWS_WITH_AS(assemble_prompt(TSTOK_DATA_DIR "/templates", "nope", {}, ""),
                         doctest::Contains("UnknownTemplate"), Error);
    CHECK_THROWS_WITH_AS(assemble_prompt(TSTOK_DATA_DIR "/templates", "general_reasoning", {{"length", "64"}}, ""),
                         doctest::Contains("MissingMetadata"), Error);
}
