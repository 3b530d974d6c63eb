#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace tstok {

struct GenerationJob {
    std::string template_id;
    std::string system_text;
    nlohmann::json metadata;   // length, channels, optional labels
    std::string plot_path;     // rendered line chart attached in live mode
    std::string model = "gpt-4o-mini";
    double temperature = 0.7;
    std::uint64_t seed = 0;

    // Fixture key: semantic job identity (plot bytes excluded so fixtures
    // survive renderer changes).
    std::string fingerprint() const;
};

class GeneratorTransport {
public:
    virtual ~GeneratorTransport() = default;
    virtual std::string generate(const GenerationJob& job) = 0;
};

// Content-addressed fixture directory of {fingerprint}.json files.
class FixtureStore {
public:
    explicit FixtureStore(std::string dir);

    bool contains(const std::string& fingerprint) const;
    std::string load(const std::string& fingerprint) const; // FixtureMiss when absent
    void save(const std::string& fingerprint, const GenerationJob& job, const std::string& response) const;

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
};

std::unique_ptr<GeneratorTransport> make_replay_transport(const std::string& fixture_dir);

// Wraps another transport and persists every response into the store.
std::unique_ptr<GeneratorTransport> make_recording_transport(std::unique_ptr<GeneratorTransport> inner,
                                                             const std::string& fixture_dir);

struct HttpTransportConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string api_key_env = "TSTOK_API_KEY";
    int max_attempts = 5; // bounded exponential backoff between attempts
    int connect_timeout_seconds = 30;
};

// Live chat-completions client. Fails fast with TransportError when the
// credential variable is unset, before any network call.
std::unique_ptr<GeneratorTransport> make_http_transport(HttpTransportConfig config);

// Offline deterministic generator used for smoke runs and to record replay
// fixtures without credentials. Output is a pure function of the job.
std::unique_ptr<GeneratorTransport> make_scripted_transport();

// Runs jobs with bounded parallelism; results are ordered like the input.
std::vector<std::string> run_generation_jobs(const std::vector<GenerationJob>& jobs, GeneratorTransport& transport,
                                             unsigned concurrency = 4);

} // namespace tstok
