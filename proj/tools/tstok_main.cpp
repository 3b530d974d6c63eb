#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tstok/benchmark.hpp"
#include "tstok/dataset.hpp"
#include "tstok/errors.hpp"
#include "tstok/eval.hpp"
#include "tstok/generator.hpp"
#include "tstok/patch_vq.hpp"
#include "tstok/plot.hpp"
#include "tstok/prompts.hpp"
#include "tstok/series.hpp"
#include "tstok/text_codec.hpp"
#include "tstok/tokenizer.hpp"
#include "tstok/vocab.hpp"
#include "tstok/window_sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tstok;

namespace {

constexpr const char* kVersion = "0.1.0";

// Every run leaves a config echo next to its primary output.
void write_run_echo(const std::string& subcommand, const json& config, const std::string& primary_out) {
    fs::path dir = primary_out.empty() ? fs::path(".") : fs::path(primary_out).parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    fs::create_directories(dir, ec);
    json echo{{"tool", "tstok"},
              {"version", kVersion},
              {"subcommand", subcommand},
              {"rng", Rng::kAlgorithm},
              {"config", config}};
    std::ofstream out(dir / "run.json", std::ios::binary);
    if (out) out << echo.dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
    fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    out << text;
}

std::unique_ptr<GeneratorTransport> make_transport(const std::string& mode, const std::string& fixtures,
                                                   bool record) {
    std::unique_ptr<GeneratorTransport> transport;
    if (mode == "replay") {
        if (fixtures.empty()) fail(errc::spec_invalid, "replay mode requires --fixtures");
        transport = make_replay_transport(fixtures);
    } else if (mode == "live") {
        transport = make_http_transport(HttpTransportConfig{});
    } else if (mode == "scripted") {
        transport = make_scripted_transport();
    } else {
        fail(errc::spec_invalid, "unknown transport '" + mode + "'");
    }
    if (record) {
        if (fixtures.empty()) fail(errc::spec_invalid, "--record requires --fixtures");
        transport = make_recording_transport(std::move(transport), fixtures);
    }
    return transport;
}

struct TokenizeArgs {
    std::string in, out, spec_out, uuid;
    std::uint64_t k = 8192;
    double s = 3.0;
    std::uint64_t offset = 0;
    bool pre_normalized = false;
    std::uint64_t seed = 42;
};

int cmd_tokenize(const TokenizeArgs& a) {
    TokenizerSpec spec{static_cast<std::uint32_t>(a.k), a.s, a.offset, a.pre_normalized};
    spec.validate();
    TimeSeries series = read_series_file(a.in);
    TokenRecord record;
    Rng rng(a.seed);
    record.uuid = a.uuid.empty() ? uuid_v4(rng) : a.uuid;
    record.spec_fingerprint = spec.fingerprint();
    if (spec.pre_normalized) {
        record.ids = encode(series, spec).ids;
    } else {
        auto normalized = normalize(series);
        TokenizerSpec enc = spec;
        enc.pre_normalized = true;
        record.ids = encode(normalized.series, enc).ids;
        record.stats_mean = normalized.stats.mean;
        record.stats_std = normalized.stats.std;
    }
    write_jsonl_file(a.out, {record.to_json()});
    if (!a.spec_out.empty()) {
        json manifest{{"K", spec.K}, {"s", spec.s}, {"vocab_offset", spec.vocab_offset},
                      {"separator_id", spec.separator_id()}};
        write_text_file(a.spec_out, manifest.dump(2) + "\n");
    }
    write_run_echo("tokenize",
                   json{{"in", a.in}, {"out", a.out}, {"K", spec.K}, {"s", spec.s},
                        {"offset", spec.vocab_offset}, {"pre_normalized", spec.pre_normalized}, {"seed", a.seed}},
                   a.out);
    std::cout << "wrote " << record.ids.size() << " tokens for series " << record.uuid << "\n";
    return 0;
}

struct DetokenizeArgs {
    std::string in, out, out_dir;
    std::uint64_t k = 8192;
    double s = 3.0;
    std::uint64_t offset = 0;
    bool restore_scale = false;
};

int cmd_detokenize(const DetokenizeArgs& a) {
    TokenizerSpec spec{static_cast<std::uint32_t>(a.k), a.s, a.offset, true};
    spec.validate();
    auto lines = read_jsonl_file(a.in);
    if (lines.size() > 1 && a.out_dir.empty())
        fail(errc::spec_invalid, "input holds multiple records; use --out-dir");
    for (const auto& line : lines) {
        TokenRecord record = TokenRecord::from_json(line);
        if (!record.spec_fingerprint.empty() && record.spec_fingerprint != spec.fingerprint())
            fail(errc::spec_invalid, "record " + record.uuid + " was produced by a different tokenizer spec");
        TimeSeries series = decode(record.ids, spec);
        if (a.restore_scale) {
            if (record.stats_mean.empty()) fail(errc::spec_invalid, "record carries no normalization stats");
            series = denormalize(series, NormalizationStats{record.stats_mean, record.stats_std});
        }
        std::string path = a.out_dir.empty() ? a.out : (fs::path(a.out_dir) / (record.uuid + ".tsk")).string();
        if (path.empty()) fail(errc::spec_invalid, "need --out or --out-dir");
        if (!a.out_dir.empty()) fs::create_directories(a.out_dir);
        write_tsk_file(path, series);
    }
    write_run_echo("detokenize", json{{"in", a.in}, {"K", spec.K}, {"s", spec.s}, {"offset", spec.vocab_offset}},
                   a.out.empty() ? a.out_dir + "/x" : a.out);
    std::cout << "decoded " << lines.size() << " record(s)\n";
    return 0;
}

struct BenchArgs {
    std::vector<std::string> in;
    std::string out = "bench.csv";
    std::size_t synthetic = 5, length = 1024, channels = 1;
    std::vector<std::uint64_t> ks{256, 1024, 4096, 8192};
    std::vector<std::uint64_t> vq_ks{16, 64, 256};
    std::uint64_t patch = 8;
    std::uint64_t precision = 2;
    std::uint64_t seed = 42;
};

int cmd_bench(const BenchArgs& a) {
    std::vector<TimeSeries> corpus;
    if (a.in.empty()) {
        corpus = make_synthetic_corpus(a.synthetic, a.length, a.channels, a.seed);
    } else {
        for (const auto& path : a.in) corpus.push_back(read_series_file(path));
    }
    std::vector<BenchmarkConfig> configs;
    for (auto k : a.ks)
        configs.push_back(BenchmarkConfig{CodecKind::Discrete, static_cast<std::uint32_t>(k), 0, 0, 0});
    for (auto k : a.vq_ks)
        configs.push_back(BenchmarkConfig{CodecKind::PatchVq, static_cast<std::uint32_t>(k),
                                          static_cast<std::uint32_t>(a.patch), 0, 50});
    configs.push_back(BenchmarkConfig{CodecKind::Text, 0, 0, static_cast<std::uint32_t>(a.precision), 0});
    auto rows = benchmark_codecs(corpus, configs, a.seed);
    write_text_file(a.out, benchmark_csv(rows));
    write_run_echo("bench-codecs", json{{"out", a.out}, {"seed", a.seed}, {"series", corpus.size()}}, a.out);
    std::cout << benchmark_csv(rows);
    return 0;
}

struct SampleArgs {
    std::vector<std::string> in;
    std::string out = "segments.jsonl";
    WindowParams params;
};

std::vector<Segment> collect_segments(const std::vector<std::string>& inputs, const WindowParams& params) {
    std::vector<Segment> all;
    for (const auto& path : inputs) {
        TimeSeries series = read_series_file(path);
        auto segments = sample_windows(series, fs::path(path).filename().string(), params);
        for (auto& seg : segments) {
            if (all.size() >= params.max_samples) break;
            all.push_back(std::move(seg));
        }
        if (all.size() >= params.max_samples) break;
    }
    return all;
}

int cmd_sample_windows(const SampleArgs& a) {
    auto segments = collect_segments(a.in, a.params);
    write_text_file(a.out, segment_manifest(segments));
    write_run_echo("sample-windows",
                   json{{"out", a.out}, {"window", a.params.window}, {"stride", a.params.stride},
                        {"seed", a.params.seed}},
                   a.out);
    std::cout << "sampled " << segments.size() << " segment(s)\n";
    return 0;
}

struct BuildArgs {
    std::vector<std::string> in;
    std::string out = "corpus.jsonl";
    std::string segments_out;
    std::string plots_dir;
    std::string templates_dir = "data/templates";
    std::vector<std::string> tasks{"general_reasoning", "classification", "decision_making", "math_reasoning"};
    std::string transport = "scripted";
    std::string fixtures;
    bool record = false;
    std::string model = "gpt-4o-mini";
    double temperature = 0.7;
    double alpha_min = 0.25, alpha_max = 1.0;
    unsigned concurrency = 4;
    WindowParams params;
};

int cmd_build_dataset(const BuildArgs& a) {
    auto transport = make_transport(a.transport, a.fixtures, a.record);
    auto segments = collect_segments(a.in, a.params);
    if (segments.empty()) fail(errc::insufficient_data, "no segments sampled from the inputs");

    std::string plots_dir = a.plots_dir.empty() ? (fs::path(a.out).parent_path() / "plots").string() : a.plots_dir;
    fs::create_directories(plots_dir);

    // conversation lengths follow the L_max * U(alpha_min, alpha_max) rule,
    // applied per segment with the segment length as the cap
    std::vector<GenerationJob> jobs;
    std::vector<TaskKind> kinds;
    std::set<std::string> known_series;
    std::vector<std::string> manifest_lines;
    for (auto& seg : segments) {
        Rng rng(derive_seed(a.params.seed, "conversation-" + seg.uuid));
        std::size_t length = conversation_length(seg.length, a.alpha_min, a.alpha_max, rng);
        seg.length = length;
        for (auto& ch : seg.values) ch.resize(length);
        known_series.insert(seg.uuid);
        manifest_lines.push_back(segment_manifest_line(seg));

        std::string task = a.tasks[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(a.tasks.size()) - 1))];
        auto kind = task_kind_from_name(task);
        if (!kind) fail(errc::spec_invalid, "unknown task '" + task + "'");
        kinds.push_back(*kind);

        std::string plot_path = (fs::path(plots_dir) / (seg.uuid + ".png")).string();
        write_line_chart(plot_path, seg.to_series());

        json metadata{{"length", std::to_string(seg.length)}, {"channels", std::to_string(seg.channels.size())}};
        if (*kind == TaskKind::classification) metadata["labels"] = json::array({"steady", "trending", "cyclic"});
        PromptBundle bundle = assemble_prompt(a.templates_dir, task, metadata, plot_path);

        GenerationJob job;
        job.template_id = task;
        job.system_text = bundle.system_text;
        job.metadata = metadata;
        job.plot_path = plot_path;
        job.model = a.model;
        job.temperature = a.temperature;
        job.seed = derive_seed(a.params.seed, "job-" + seg.uuid);
        jobs.push_back(std::move(job));
    }

    auto raw_texts = run_generation_jobs(jobs, *transport, a.concurrency);

    std::vector<std::string> lines;
    std::size_t rejected = 0;
    std::map<std::string, std::size_t> reject_counts;
    for (std::size_t i = 0; i < raw_texts.size(); ++i) {
        Rng rng(derive_seed(a.params.seed, "sample-" + segments[i].uuid));
        try {
            if (kinds[i] == TaskKind::qa) {
                QASample sample = parse_qa(raw_texts[i]);
                sample.uuid = uuid_v4(rng);
                sample.series_uuid = segments[i].uuid;
                auto verdict = validate_sample(sample, &known_series);
                if (!verdict.accepted) {
                    ++rejected;
                    ++reject_counts[reject_reason_name(*verdict.reason)];
                    continue;
                }
                lines.push_back(sample.to_json());
            } else {
                ConversationSample sample;
                sample.turns = parse_conversation(raw_texts[i]);
                sample.uuid = uuid_v4(rng);
                sample.series_uuid = segments[i].uuid;
                sample.task_kind = kinds[i];
                auto verdict = validate_sample(sample, &known_series);
                if (!verdict.accepted) {
                    ++rejected;
                    ++reject_counts[reject_reason_name(*verdict.reason)];
                    continue;
                }
                lines.push_back(sample.to_json());
            }
        } catch (const Error& e) {
            ++rejected;
            ++reject_counts[e.code() == errc::repeated_role ? "RepeatedRole" : "BadFormat"];
        }
    }
    write_jsonl_file(a.out, lines);
    std::string segments_out = a.segments_out.empty() ? a.out + ".segments.jsonl" : a.segments_out;
    std::string manifest;
    for (const auto& l : manifest_lines) manifest += l + "\n";
    write_text_file(segments_out, manifest);

    write_run_echo("build-dataset",
                   json{{"in", a.in}, {"out", a.out}, {"transport", a.transport}, {"seed", a.params.seed},
                        {"window", a.params.window}, {"stride", a.params.stride}, {"tasks", a.tasks},
                        {"alpha_min", a.alpha_min}, {"alpha_max", a.alpha_max}, {"model", a.model},
                        {"temperature", a.temperature}},
                   a.out);
    std::cout << "accepted " << lines.size() << " sample(s), rejected " << rejected;
    for (const auto& [reason, count] : reject_counts) std::cout << " " << reason << "=" << count;
    std::cout << "\n";
    return 0;
}

struct ValidateArgs {
    std::string in;
    std::string series;
    std::string report_out;
};

int cmd_validate(const ValidateArgs& a) {
    auto lines = read_jsonl_file(a.in);
    std::set<std::string> known;
    std::set<std::string>* known_ptr = nullptr;
    if (!a.series.empty()) {
        for (const auto& line : read_jsonl_file(a.series)) {
            json j = json::parse(line, nullptr, false);
            if (!j.is_discarded() && j.contains("uuid")) known.insert(j["uuid"].get<std::string>());
        }
        known_ptr = &known;
    }
    auto report = validate_corpus(lines, known_ptr);
    json entries = json::array();
    for (const auto& e : report.entries) {
        if (e.verdict.accepted) continue;
        std::cout << "rejected(" << reject_reason_name(*e.verdict.reason) << ") uuid=" << (e.uuid.empty() ? "?" : e.uuid)
                  << " " << e.verdict.detail << "\n";
        entries.push_back(json{{"uuid", e.uuid},
                               {"reason", reject_reason_name(*e.verdict.reason)},
                               {"detail", e.verdict.detail}});
    }
    std::size_t rejected = report.entries.size() - report.accepted;
    std::cout << "accepted " << report.accepted << " of " << report.entries.size() << ", rejected " << rejected
              << "\n";
    if (!a.report_out.empty()) {
        json j{{"accepted", report.accepted},
               {"rejected", rejected},
               {"rejection_counts", report.rejection_counts},
               {"rejections", entries}};
        write_text_file(a.report_out, j.dump(2) + "\n");
    }
    return rejected == 0 ? 0 : 1;
}

struct BalanceArgs {
    std::string in, out;
    std::uint64_t seed = 42;
};

int cmd_balance(const BalanceArgs& a) {
    auto lines = read_jsonl_file(a.in);
    std::vector<QASample> samples;
    samples.reserve(lines.size());
    for (const auto& line : lines) samples.push_back(QASample::from_json(line));
    Rng rng(a.seed);
    auto balanced = balance_qa(std::move(samples), rng);
    std::vector<std::string> out_lines;
    std::map<char, std::size_t> counts;
    for (const auto& s : balanced.samples) {
        ++counts[s.correct];
        out_lines.push_back(s.to_json());
    }
    write_jsonl_file(a.out, out_lines);
    write_run_echo("balance-qa", json{{"in", a.in}, {"out", a.out}, {"seed", a.seed}}, a.out);
    std::cout << "balanced " << balanced.samples.size() << " sample(s), trimmed " << balanced.trimmed;
    for (const auto& [letter, count] : counts) std::cout << " " << letter << "=" << count;
    std::cout << "\n";
    return 0;
}

struct SpliceArgs {
    std::string corpus, tokens, out;
};

int cmd_splice(const SpliceArgs& a) {
    std::map<std::string, TokenRecord> by_series;
    for (const auto& line : read_jsonl_file(a.tokens)) {
        TokenRecord r = TokenRecord::from_json(line);
        by_series[r.uuid] = std::move(r);
    }
    std::vector<std::string> out_lines;
    std::size_t skipped = 0;
    for (const auto& line : read_jsonl_file(a.corpus)) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || j.value("kind", "") == "qa") {
            ++skipped;
            continue;
        }
        ConversationSample sample = ConversationSample::from_json(line);
        auto it = by_series.find(sample.series_uuid);
        if (it == by_series.end()) {
            ++skipped;
            continue;
        }
        out_lines.push_back(splice_series(sample, it->second));
    }
    write_jsonl_file(a.out, out_lines);
    write_run_echo("splice", json{{"corpus", a.corpus}, {"tokens", a.tokens}, {"out", a.out}}, a.out);
    std::cout << "spliced " << out_lines.size() << " record(s), skipped " << skipped << "\n";
    return 0;
}

struct StatsArgs {
    std::string in, out;
};

int cmd_stats(const StatsArgs& a) {
    auto stats = dataset_stats(read_jsonl_file(a.in));
    std::string text = stats.to_json();
    if (!a.out.empty()) write_text_file(a.out, text + "\n");
    std::cout << text << "\n";
    return 0;
}

struct ExtendArgs {
    std::string emb_in, emb_out, map_out, manifest_out;
    std::uint64_t text_vocab = 0;
    std::uint64_t k = 8192;
    double s = 3.0;
    std::vector<std::string> corpus;
};

int cmd_extend_vocab(const ExtendArgs& a) {
    EmbeddingMatrix matrix = read_embeddings_file(a.emb_in);
    std::uint64_t text_vocab = a.text_vocab == 0 ? matrix.rows : a.text_vocab;
    if (text_vocab != matrix.rows)
        fail(errc::corrupt_matrix, "matrix has " + std::to_string(matrix.rows) + " rows but --text-vocab says " +
                                       std::to_string(text_vocab));
    TokenizerSpec spec{static_cast<std::uint32_t>(a.k), a.s, text_vocab, false};
    VocabularyMap map = build_vocab_map(text_vocab, spec);
    EmbeddingMatrix extended = extend_embeddings_mean(matrix, static_cast<std::uint32_t>(map.new_token_count()));
    write_embeddings_file(a.emb_out, extended);
    if (!a.map_out.empty()) {
        json j{{"text_vocab_size", map.text_vocab_size}, {"new_id_first", map.new_id_first},
               {"new_id_last", map.new_id_last},         {"separator_id", map.separator_id},
               {"reserved_id", map.reserved_id},         {"spec_fingerprint", map.spec_fingerprint}};
        write_text_file(a.map_out, j.dump(2) + "\n");
    }
    if (!a.manifest_out.empty())
        write_text_file(a.manifest_out, emit_training_manifest(map, spec, a.corpus) + "\n");
    write_run_echo("extend-vocab",
                   json{{"emb_in", a.emb_in}, {"emb_out", a.emb_out}, {"K", spec.K}, {"text_vocab", text_vocab}},
                   a.emb_out);
    std::cout << "extended " << matrix.rows << " -> " << extended.rows << " rows (separator id " << map.separator_id
              << ")\n";
    return 0;
}

struct EvalArgs {
    std::string qa, responses, prompts_dir, out;
};

std::vector<std::string> prompt_ids_in(const std::string& dir) {
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".txt") ids.push_back(entry.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    if (ids.empty()) fail(errc::io_error, "no prompt files under " + dir);
    return ids;
}

int cmd_eval_qa(const EvalArgs& a) {
    std::vector<QASample> samples;
    for (const auto& line : read_jsonl_file(a.qa)) samples.push_back(QASample::from_json(line));
    auto prompt_ids = prompt_ids_in(a.prompts_dir);

    std::map<std::string, std::map<ResponseKey, std::string>> by_model;
    for (const auto& line : read_jsonl_file(a.responses)) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("uuid") || !j.contains("prompt_id") || !j.contains("response"))
            fail(errc::bad_format, "malformed response line");
        by_model[j.value("model", "model")][{j["uuid"].get<std::string>(), j["prompt_id"].get<std::string>()}] =
            j["response"].get<std::string>();
    }

    std::string csv = "model,prompt_id,correct_pct,wrong_pct,null_pct\n";
    for (const auto& [model, responses] : by_model) {
        QAReport report = score_qa(samples, responses, prompt_ids);
        std::string rows = qa_report_csv(model, report);
        csv += rows.substr(rows.find('\n') + 1); // drop the per-model header
        std::cout << model << ": correct " << report.correct_agg.mean << "% (std " << report.correct_agg.stddev
                  << "), wrong " << report.wrong_agg.mean << "%, null " << report.null_agg.mean << "%\n";
    }
    if (!a.out.empty()) write_text_file(a.out, csv);
    write_run_echo("eval-qa", json{{"qa", a.qa}, {"responses", a.responses}, {"prompts", a.prompts_dir}}, a.out);
    return 0;
}

struct JudgeArgs {
    std::string qa, responses, rubric, out, ranking_out;
    std::string transport = "scripted";
    std::string fixtures;
    bool record = false;
    std::string model = "gpt-4o";
    std::uint64_t seed = 42;
};

int cmd_judge(const JudgeArgs& a) {
    auto transport = make_transport(a.transport, a.fixtures, a.record);
    std::string rubric = load_text_file(a.rubric);
    std::map<std::string, QASample> samples;
    for (const auto& line : read_jsonl_file(a.qa)) {
        QASample s = QASample::from_json(line);
        samples[s.uuid] = std::move(s);
    }

    std::vector<std::string> out_lines;
    std::map<std::string, std::vector<double>> overall_by_model;
    for (const auto& line : read_jsonl_file(a.responses)) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("uuid") || !j.contains("response"))
            fail(errc::bad_format, "malformed response line");
        std::string uuid = j["uuid"].get<std::string>();
        auto it = samples.find(uuid);
        if (it == samples.end()) fail(errc::missing_response, "no QA sample with uuid " + uuid);
        std::string model = j.value("model", "model");
        auto scores = judge_score(*transport, it->second, j["response"].get<std::string>(), rubric, a.model,
                                  derive_seed(a.seed, model + uuid));
        json record{{"uuid", uuid}, {"model", model}, {"missing_replicates", scores.missing}};
        for (std::size_t m = 0; m < kJudgeMetrics.size(); ++m) {
            record[kJudgeMetrics[m]] = {{"mean", scores.mean[m]}, {"std", scores.stddev[m]}};
        }
        json reps = json::array();
        for (const auto& r : scores.replicates) reps.push_back(r);
        record["replicates"] = reps;
        out_lines.push_back(record.dump());
        overall_by_model[model].push_back(scores.mean[0]);
    }
    if (!a.out.empty()) write_jsonl_file(a.out, out_lines);

    std::map<std::string, double> means;
    for (const auto& [model, values] : overall_by_model) {
        double sum = 0.0;
        for (double v : values) sum += v;
        means[model] = sum / static_cast<double>(values.size());
    }
    auto points = rank_points(means);
    std::string ranking_csv = "model,overall_mean,points\n";
    for (const auto& [model, mean] : means) {
        std::cout << model << ": overall " << mean << ", points " << points[model] << "\n";
        ranking_csv += model + "," + std::to_string(mean) + "," + std::to_string(points[model]) + "\n";
    }
    if (!a.ranking_out.empty()) write_text_file(a.ranking_out, ranking_csv);
    write_run_echo("judge", json{{"qa", a.qa}, {"responses", a.responses}, {"seed", a.seed}},
                   a.out.empty() ? a.ranking_out : a.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-series tokenization, dataset, and evaluation toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    TokenizeArgs tok;
    auto* tokenize = app.add_subcommand("tokenize", "encode a series container into token ids");
    tokenize->add_option("--in", tok.in, "input series (.tsk or .csv)")->required();
    tokenize->add_option("--out", tok.out, "output token JSONL")->required();
    tokenize->add_option("--k", tok.k, "codebook size K");
    tokenize->add_option("--s", tok.s, "clamp half-range in normalized units");
    tokenize->add_option("--offset", tok.offset, "text vocabulary size |V_L|");
    tokenize->add_option("--uuid", tok.uuid, "series uuid (defaults to a seeded uuid4)");
    tokenize->add_option("--spec-out", tok.spec_out, "write the tokenizer spec manifest JSON");
    tokenize->add_option("--seed", tok.seed, "seed for generated uuids");
    tokenize->add_flag("--pre-normalized", tok.pre_normalized, "input is already in normalized units");

    DetokenizeArgs detok;
    auto* detokenize = app.add_subcommand("detokenize", "decode token ids back to a series container");
    detokenize->add_option("--in", detok.in, "input token JSONL")->required();
    detokenize->add_option("--out", detok.out, "output .tsk path (single record)");
    detokenize->add_option("--out-dir", detok.out_dir, "output directory (one .tsk per record)");
    detokenize->add_option("--k", detok.k, "codebook size K");
    detokenize->add_option("--s", detok.s, "clamp half-range");
    detokenize->add_option("--offset", detok.offset, "text vocabulary size");
    detokenize->add_flag("--restore-scale", detok.restore_scale, "apply stored normalization stats");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench-codecs", "reconstruction error vs codebook size and compression");
    bench_cmd->add_option("--in", bench.in, "series files (default: synthetic corpus)");
    bench_cmd->add_option("--out", bench.out, "output CSV");
    bench_cmd->add_option("--synthetic", bench.synthetic, "synthetic series count");
    bench_cmd->add_option("--length", bench.length, "synthetic series length");
    bench_cmd->add_option("--channels", bench.channels, "synthetic channels");
    bench_cmd->add_option("--ks", bench.ks, "discrete codebook sizes");
    bench_cmd->add_option("--vq-ks", bench.vq_ks, "patch VQ codebook sizes");
    bench_cmd->add_option("--patch", bench.patch, "patch length P");
    bench_cmd->add_option("--precision", bench.precision, "text codec decimal places");
    bench_cmd->add_option("--seed", bench.seed, "corpus and training seed");

    SampleArgs sample;
    auto add_window_options = [](CLI::App* cmd, WindowParams& p) {
        cmd->add_option("--window", p.window, "window size W");
        cmd->add_option("--stride", p.stride, "stride D");
        cmd->add_option("--min-len", p.min_length, "minimum segment length m");
        cmd->add_option("--max-len", p.max_length, "maximum segment length M");
        cmd->add_option("--max-elements", p.max_elements, "cap on length*channels per segment");
        cmd->add_option("--max-samples", p.max_samples, "per-dataset segment cap N_s");
        cmd->add_option("--seed", p.seed, "master sampling seed");
    };
    auto* sample_cmd = app.add_subcommand("sample-windows", "sliding-window segment extraction");
    sample_cmd->add_option("--in", sample.in, "input series files")->required();
    sample_cmd->add_option("--out", sample.out, "segment manifest JSONL");
    add_window_options(sample_cmd, sample.params);

    BuildArgs build;
    build.params.window = 64;
    build.params.stride = 32;
    build.params.max_length = 64;
    auto* build_cmd = app.add_subcommand("build-dataset", "sample segments, generate and validate conversations");
    build_cmd->add_option("--in", build.in, "input series files")->required();
    build_cmd->add_option("--out", build.out, "output corpus JSONL");
    build_cmd->add_option("--segments-out", build.segments_out, "segment manifest path");
    build_cmd->add_option("--plots-dir", build.plots_dir, "directory for rendered charts");
    build_cmd->add_option("--templates", build.templates_dir, "system prompt template directory");
    build_cmd->add_option("--tasks", build.tasks, "conversation task mix");
    build_cmd->add_option("--transport", build.transport, "scripted | replay | live");
    build_cmd->add_option("--fixtures", build.fixtures, "fixture directory for replay/record");
    build_cmd->add_flag("--record", build.record, "persist responses into the fixture store");
    build_cmd->add_option("--model", build.model, "generator model name");
    build_cmd->add_option("--temperature", build.temperature, "generator temperature");
    build_cmd->add_option("--alpha-min", build.alpha_min, "conversation length lower fraction");
    build_cmd->add_option("--alpha-max", build.alpha_max, "conversation length upper fraction");
    build_cmd->add_option("--concurrency", build.concurrency, "parallel generation jobs");
    add_window_options(build_cmd, build.params);

    ValidateArgs validate;
    auto* validate_cmd = app.add_subcommand("validate-dataset", "apply the cleaning rules to a corpus");
    validate_cmd->add_option("--in", validate.in, "corpus JSONL")->required();
    validate_cmd->add_option("--series", validate.series, "segment manifest for series resolution");
    validate_cmd->add_option("--report", validate.report_out, "write a JSON report");

    BalanceArgs balance;
    auto* balance_cmd = app.add_subcommand("balance-qa", "relabel answers so each letter is correct equally often");
    balance_cmd->add_option("--in", balance.in, "QA corpus JSONL")->required();
    balance_cmd->add_option("--out", balance.out, "balanced output JSONL")->required();
    balance_cmd->add_option("--seed", balance.seed, "shuffle seed");

    SpliceArgs splice;
    auto* splice_cmd = app.add_subcommand("splice", "replace placeholders with <ts> token spans");
    splice_cmd->add_option("--corpus", splice.corpus, "validated corpus JSONL")->required();
    splice_cmd->add_option("--tokens", splice.tokens, "token records JSONL")->required();
    splice_cmd->add_option("--out", splice.out, "training records JSONL")->required();

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "token histogram, task counts, length percentiles");
    stats_cmd->add_option("--in", stats.in, "training records JSONL")->required();
    stats_cmd->add_option("--out", stats.out, "output JSON path");

    ExtendArgs extend;
    auto* extend_cmd = app.add_subcommand("extend-vocab", "mean-initialize rows for the new token ids");
    extend_cmd->add_option("--emb", extend.emb_in, "input EMB1 matrix")->required();
    extend_cmd->add_option("--out", extend.emb_out, "output EMB1 matrix")->required();
    extend_cmd->add_option("--text-vocab", extend.text_vocab, "text vocabulary size (defaults to matrix rows)");
    extend_cmd->add_option("--k", extend.k, "codebook size K");
    extend_cmd->add_option("--s", extend.s, "clamp half-range");
    extend_cmd->add_option("--map-out", extend.map_out, "write the vocabulary map JSON");
    extend_cmd->add_option("--manifest-out", extend.manifest_out, "write the training manifest JSON");
    extend_cmd->add_option("--corpus", extend.corpus, "corpus paths recorded in the manifest");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval-qa", "score responses against QA samples across system prompts");
    eval_cmd->add_option("--qa", eval.qa, "QA corpus JSONL")->required();
    eval_cmd->add_option("--responses", eval.responses, "responses JSONL")->required();
    eval_cmd->add_option("--prompts", eval.prompts_dir, "system prompt directory")->required();
    eval_cmd->add_option("--out", eval.out, "results CSV");

    JudgeArgs judge;
    auto* judge_cmd = app.add_subcommand("judge", "triplicate rubric scoring with ranking points");
    judge_cmd->add_option("--qa", judge.qa, "QA corpus JSONL")->required();
    judge_cmd->add_option("--responses", judge.responses, "responses JSONL")->required();
    judge_cmd->add_option("--rubric", judge.rubric, "judge rubric template")->required();
    judge_cmd->add_option("--out", judge.out, "judge results JSONL");
    judge_cmd->add_option("--ranking-out", judge.ranking_out, "ranking CSV");
    judge_cmd->add_option("--transport", judge.transport, "scripted | replay | live");
    judge_cmd->add_option("--fixtures", judge.fixtures, "fixture directory");
    judge_cmd->add_flag("--record", judge.record, "persist judge responses");
    judge_cmd->add_option("--model", judge.model, "judge model name");
    judge_cmd->add_option("--seed", judge.seed, "judge seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(tokenize)) return cmd_tokenize(tok);
        if (app.got_subcommand(detokenize)) return cmd_detokenize(detok);
        if (app.got_subcommand(bench_cmd)) return cmd_bench(bench);
        if (app.got_subcommand(sample_cmd)) return cmd_sample_windows(sample);
        if (app.got_subcommand(build_cmd)) return cmd_build_dataset(build);
        if (app.got_subcommand(validate_cmd)) return cmd_validate(validate);
        if (app.got_subcommand(balance_cmd)) return cmd_balance(balance);
        if (app.got_subcommand(splice_cmd)) return cmd_splice(splice);
        if (app.got_subcommand(stats_cmd)) return cmd_stats(stats);
        if (app.got_subcommand(extend_cmd)) return cmd_extend_vocab(extend);
        if (app.got_subcommand(eval_cmd)) return cmd_eval_qa(eval);
        if (app.got_subcommand(judge_cmd)) return cmd_judge(judge);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
