#include "tstok/generator.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "tstok/errors.hpp"
#include "tstok/prompts.hpp"
#include "tstok/rng.hpp"

namespace tstok {

namespace {

using nlohmann::json;

json job_identity(const GenerationJob& job) {
    return json{{"template_id", job.template_id},
                {"metadata", job.metadata},
                {"model", job.model},
                {"temperature", job.temperature},
                {"seed", job.seed}};
}

} // namespace

std::string GenerationJob::fingerprint() const {
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(job_identity(*this).dump())));
    return std::string(out);
}

FixtureStore::FixtureStore(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

bool FixtureStore::contains(const std::string& fingerprint) const {
    return std::filesystem::exists(std::filesystem::path(dir_) / (fingerprint + ".json"));
}

std::string FixtureStore::load(const std::string& fingerprint) const {
    auto path = std::filesystem::path(dir_) / (fingerprint + ".json");
    if (!std::filesystem::exists(path))
        fail(errc::fixture_miss, "no fixture " + fingerprint + " under " + dir_);
    json j = json::parse(load_text_file(path.string()), nullptr, false);
    if (j.is_discarded() || !j.contains("response")) fail(errc::fixture_miss, "malformed fixture " + fingerprint);
    return j["response"].get<std::string>();
}

void FixtureStore::save(const std::string& fingerprint, const GenerationJob& job, const std::string& response) const {
    json j{{"fingerprint", fingerprint}, {"job", job_identity(job)}, {"response", response}};
    auto path = std::filesystem::path(dir_) / (fingerprint + ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot write fixture " + path.string());
    out << j.dump(2) << '\n';
}

namespace {

class ReplayTransport final : public GeneratorTransport {
public:
    explicit ReplayTransport(const std::string& dir) : store_(dir) {}

    std::string generate(const GenerationJob& job) override { return store_.load(job.fingerprint()); }

private:
    FixtureStore store_;
};

class RecordingTransport final : public GeneratorTransport {
public:
    RecordingTransport(std::unique_ptr<GeneratorTransport> inner, const std::string& dir)
        : inner_(std::move(inner)), store_(dir) {}

    std::string generate(const GenerationJob& job) override {
        std::string response = inner_->generate(job);
        std::lock_guard<std::mutex> lock(write_mutex_);
        store_.save(job.fingerprint(), job, response);
        return response;
    }

private:
    std::unique_ptr<GeneratorTransport> inner_;
    FixtureStore store_;
    std::mutex write_mutex_;
};

class HttpTransport final : public GeneratorTransport {
public:
    explicit HttpTransport(HttpTransportConfig config) : config_(std::move(config)) {}

    std::string generate(const GenerationJob& job) override {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (!key || !*key)
            fail(errc::transport_error,
                 "auth: environment variable " + config_.api_key_env + " is not set (no request sent)");

        json body{{"model", job.model},
                  {"temperature", job.temperature},
                  {"seed", job.seed},
                  {"messages", json::array({json{{"role", "system"}, {"content", job.system_text}}})}};
        if (!job.plot_path.empty()) body["messages"].push_back(make_image_turn(job));

        std::string last_error;
        for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(100LL << std::min(attempt, 6));
                std::this_thread::sleep_for(delay);
            }
            httplib::Client client(config_.base_url);
            if (!client.is_valid()) fail(errc::transport_error, "unsupported base url " + config_.base_url);
            client.set_connection_timeout(config_.connect_timeout_seconds);
            client.set_bearer_token_auth(key);
            auto result = client.Post(config_.path, body.dump(), "application/json");
            if (!result) {
                last_error = "connection failed (" + httplib::to_string(result.error()) + ")";
                continue;
            }
            if (result->status == 429 || result->status >= 500) {
                last_error = "status " + std::to_string(result->status);
                continue;
            }
            if (result->status != 200)
                fail(errc::transport_error, "status " + std::to_string(result->status) + ": " + result->body);
            json reply = json::parse(result->body, nullptr, false);
            if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty())
                fail(errc::transport_error, "unexpected response body");
            return reply["choices"][0]["message"]["content"].get<std::string>();
        }
        fail(errc::transport_error, "gave up after " + std::to_string(config_.max_attempts) + " attempts: " + last_error);
    }

private:
    static json make_image_turn(const GenerationJob& job) {
        static const char* b64 = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
        std::string raw = load_text_file(job.plot_path);
        std::string encoded;
        encoded.reserve((raw.size() + 2) / 3 * 4);
        for (std::size_t i = 0; i < raw.size(); i += 3) {
            std::uint32_t chunk = static_cast<unsigned char>(raw[i]) << 16;
            if (i + 1 < raw.size()) chunk |= static_cast<unsigned char>(raw[i + 1]) << 8;
            if (i + 2 < raw.size()) chunk |= static_cast<unsigned char>(raw[i + 2]);
            encoded += b64[(chunk >> 18) & 63];
            encoded += b64[(chunk >> 12) & 63];
            encoded += i + 1 < raw.size() ? b64[(chunk >> 6) & 63] : '=';
            encoded += i + 2 < raw.size() ? b64[chunk & 63] : '=';
        }
        return json{{"role", "user"},
                    {"content", json::array({json{{"type", "image_url"},
                                                  {"image_url", {{"url", "data:image/png;base64," + encoded}}}}})}};
    }

    HttpTransportConfig config_;
};

// Deterministic offline generator. Each template id yields text in the shape
// the downstream parser expects; wording varies with the seeded stream.
class ScriptedTransport final : public GeneratorTransport {
public:
    std::string generate(const GenerationJob& job) override {
        Rng rng(derive_seed(job.seed, job.template_id + job.metadata.dump()));
        std::string length = field(job, "length");
        std::string channels = field(job, "channels");
        if (job.template_id == "judge") return judge_text(rng);
        if (job.template_id == "qa") return qa_text(rng, length);
        if (job.template_id == "classification") return classification_text(job, rng, length);
        if (job.template_id == "math_reasoning") return math_text(rng, length);
        if (job.template_id == "decision_making") return decision_text(rng, length);
        return reasoning_text(rng, length, channels);
    }

private:
    static std::string field(const GenerationJob& job, const char* name) {
        if (!job.metadata.contains(name)) return "unknown";
        const auto& v = job.metadata[name];
        return v.is_string() ? v.get<std::string>() : v.dump();
    }

    template <std::size_t N>
    static const char* pick(Rng& rng, const char* (&options)[N]) {
        return options[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(N) - 1))];
    }

    static std::string reasoning_text(Rng& rng, const std::string& length, const std::string& channels) {
        static const char* topics[] = {"power consumption", "daily temperatures", "sensor readings",
                                       "website traffic", "river flow measurements"};
        static const char* findings[] = {
            "a gradual upward drift with short-lived dips",
            "pronounced oscillations that settle toward the end",
            "a stable baseline interrupted by a sharp spike near the middle",
            "two distinct regimes separated by an abrupt level shift"};
        std::string topic = pick(rng, topics);
        std::string finding = pick(rng, findings);
        return "User: I've been tracking " + topic + " and collected " + length +
               " points. Here's the data: [user-input]\nAI: Looking over the " + length + "-point series across " +
               channels + " channel(s), I see " + finding +
               ". That pattern usually reflects how the underlying process responds to its environment.";
    }

    static std::string classification_text(const GenerationJob& job, Rng& rng, const std::string& length) {
        std::string labels = "steady, trending, cyclic";
        if (job.metadata.contains("labels")) {
            labels.clear();
            for (const auto& l : job.metadata["labels"]) {
                if (!labels.empty()) labels += ", ";
                labels += l.is_string() ? l.get<std::string>() : l.dump();
            }
        }
        static const char* verdicts[] = {"first", "second", "last"};
        return "User: Please classify this " + length + "-point series using the labels (" + labels +
               "): [user-input]\nAI: Based on the overall shape, the " + pick(rng, verdicts) +
               " label fits best; the series matches its profile more closely than the alternatives.";
    }

    static std::string math_text(Rng& rng, const std::string& length) {
        long long first = rng.uniform_int(80, 140);
        long long last = rng.uniform_int(150, 260);
        long long span = std::max<long long>(1, rng.uniform_int(20, 90));
        double slope = static_cast<double>(last - first) / static_cast<double>(span);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f", slope);
        return "User: I need the overall slope of this series of " + length +
               " values: [user-input]\nAI: Using slope = (y_last - y_first) / (x_last - x_first) = (" +
               std::to_string(last) + " - " + std::to_string(first) + ") / " + std::to_string(span) + " = " + buf +
               ", the series rises by about " + buf + " units per step.";
    }

    static std::string decision_text(Rng& rng, const std::string& length) {
        static const char* scenarios[] = {"scale up capacity now", "hold spending until next quarter",
                                          "rebalance the inventory mix"};
        return "User: Given these " + length + " readings, should we " + std::string(pick(rng, scenarios)) +
               "? [user-input]\nAI: The recent trajectory supports acting, but gradually: the level is improving "
               "while the variability warns against an aggressive move, so a measured step with close monitoring "
               "is the better decision.";
    }

    static std::string judge_text(Rng& rng) {
        long long overall = rng.uniform_int(3, 5);
        long long helpfulness = std::max<long long>(1, overall + rng.uniform_int(-1, 0));
        long long relevance = std::min<long long>(5, overall + rng.uniform_int(0, 1));
        long long accuracy = std::max<long long>(1, overall + rng.uniform_int(-1, 1));
        accuracy = std::min<long long>(5, accuracy);
        return "The response addresses the question with reasonable grounding.\noverall=" +
               std::to_string(overall) + " helpfulness=" + std::to_string(helpfulness) +
               " relevance=" + std::to_string(relevance) + " accuracy=" + std::to_string(accuracy);
    }

    static std::string qa_text(Rng& rng, const std::string& length) {
        static const char* themes[] = {"energy consumption", "patient heart-rate", "traffic volume",
                                       "equipment vibration"};
        static const char* wrongs[] = {"A data-collection error corrupted the series.",
                                       "The process is perfectly stationary throughout.",
                                       "Random noise with no underlying structure.",
                                       "A one-off outlier explains the whole pattern.",
                                       "The sensor was disconnected for most of the period."};
        static const char* rights[] = {
            "A recurring cycle with a gradual underlying trend.",
            "A level shift consistent with a change in the underlying process.",
            "Sustained growth with short corrective dips."};
        std::string theme = pick(rng, themes);
        std::string right = pick(rng, rights);
        std::vector<std::size_t> order{0, 1, 2, 3, 4};
        rng.shuffle(order);
        std::string w1 = wrongs[order[0]];
        std::string w2 = wrongs[order[1]];
        std::string w3 = wrongs[order[2]];
        return "User: The dataset tracks " + theme + " over " + length +
               " intervals. Which interpretation best matches the data? [user-input]\nA: " + w1 + "\nB: " + w2 +
               "\nC: " + w3 + "\nD: " + right + "\nAI: The correct answer is D: " + right +
               "\nThe shape of the series matches option D: its movements are systematic rather than artifacts, "
               "which rules out the competing explanations.";
    }
};

} // namespace

std::unique_ptr<GeneratorTransport> make_replay_transport(const std::string& fixture_dir) {
    return std::make_unique<ReplayTransport>(fixture_dir);
}

std::unique_ptr<GeneratorTransport> make_recording_transport(std::unique_ptr<GeneratorTransport> inner,
                                                             const std::string& fixture_dir) {
    return std::make_unique<RecordingTransport>(std::move(inner), fixture_dir);
}

std::unique_ptr<GeneratorTransport> make_http_transport(HttpTransportConfig config) {
    return std::make_unique<HttpTransport>(std::move(config));
}

std::unique_ptr<GeneratorTransport> make_scripted_transport() { return std::make_unique<ScriptedTransport>(); }

std::vector<std::string> run_generation_jobs(const std::vector<GenerationJob>& jobs, GeneratorTransport& transport,
                                             unsigned concurrency) {
    std::vector<std::string> results(jobs.size());
    if (jobs.empty()) return results;
    concurrency = std::max(1u, std::min<unsigned>(concurrency, static_cast<unsigned>(jobs.size())));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                results[i] = transport.generate(jobs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < concurrency; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

} // namespace tstok
