#include "tstok/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tstok/errors.hpp"

namespace tstok {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

bool is_option_letter(char c) { return c >= 'A' && c <= 'D'; }

} // namespace

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::general_reasoning: return "general_reasoning";
        case TaskKind::classification: return "classification";
        case TaskKind::decision_making: return "decision_making";
        case TaskKind::math_reasoning: return "math_reasoning";
        case TaskKind::qa: return "qa";
    }
    return "general_reasoning";
}

std::optional<TaskKind> task_kind_from_name(const std::string& name) {
    for (TaskKind k : {TaskKind::general_reasoning, TaskKind::classification, TaskKind::decision_making,
                       TaskKind::math_reasoning, TaskKind::qa}) {
        if (name == task_kind_name(k)) return k;
    }
    return std::nullopt;
}

std::string ConversationSample::to_json() const {
    json turns_json = json::array();
    for (const auto& t : turns) turns_json.push_back({{"role", t.role}, {"content", t.content}});
    json j{{"kind", "conversation"},
           {"uuid", uuid},
           {"task_kind", task_kind_name(task_kind)},
           {"series_uuid", series_uuid},
           {"turns", turns_json}};
    return j.dump();
}

ConversationSample ConversationSample::from_json(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(errc::bad_format, "unparseable record");
    ConversationSample s;
    if (!j.contains("uuid") || !j["uuid"].is_string() || !j.contains("series_uuid") ||
        !j["series_uuid"].is_string() || !j.contains("turns") || !j["turns"].is_array())
        fail(errc::bad_format, "missing conversation fields");
    s.uuid = j["uuid"].get<std::string>();
    s.series_uuid = j["series_uuid"].get<std::string>();
    if (j.contains("task_kind") && j["task_kind"].is_string()) {
        auto k = task_kind_from_name(j["task_kind"].get<std::string>());
        s.task_kind = k.value_or(TaskKind::general_reasoning);
    }
    for (const auto& t : j["turns"]) {
        if (!t.is_object() || !t.contains("role") || !t.contains("content") || !t["role"].is_string() ||
            !t["content"].is_string())
            fail(errc::bad_format, "malformed turn");
        s.turns.push_back(Turn{t["role"].get<std::string>(), t["content"].get<std::string>()});
    }
    return s;
}

std::string QASample::to_json() const {
    json opts = json::object();
    for (const auto& [letter, text] : options) opts[std::string(1, letter)] = text;
    json j{{"kind", "qa"},          {"uuid", uuid},       {"series_uuid", series_uuid},
           {"question", question},  {"options", opts},    {"correct", std::string(1, correct)},
           {"explanation", explanation}};
    return j.dump();
}

QASample QASample::from_json(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(errc::bad_format, "unparseable record");
    if (!j.contains("uuid") || !j["uuid"].is_string() || !j.contains("series_uuid") ||
        !j["series_uuid"].is_string() || !j.contains("question") || !j["question"].is_string() ||
        !j.contains("options") || !j["options"].is_object() || !j.contains("correct") ||
        !j["correct"].is_string())
        fail(errc::bad_format, "missing qa fields");
    QASample s;
    s.uuid = j["uuid"].get<std::string>();
    s.series_uuid = j["series_uuid"].get<std::string>();
    s.question = j["question"].get<std::string>();
    for (const auto& [key, value] : j["options"].items()) {
        if (key.size() != 1 || !value.is_string()) fail(errc::bad_format, "malformed option");
        s.options[key[0]] = value.get<std::string>();
    }
    std::string correct = j["correct"].get<std::string>();
    if (correct.size() != 1) fail(errc::bad_format, "malformed correct letter");
    s.correct = correct[0];
    if (j.contains("explanation") && j["explanation"].is_string())
        s.explanation = j["explanation"].get<std::string>();
    return s;
}

std::vector<Turn> parse_conversation(const std::string& raw) {
    std::vector<Turn> turns;
    std::istringstream in(raw);
    std::string line;
    std::string current_role;
    std::string current_content;
    std::string leading;
    auto flush = [&]() {
        if (current_role.empty()) return;
        std::string content = trim(current_content);
        if (content.empty()) fail(errc::bad_format, "empty " + current_role + " turn");
        turns.push_back(Turn{current_role, content});
        current_content.clear();
    };
    while (std::getline(in, line)) {
        std::string t = trim(line);
        std::string role;
        std::string rest;
        if (t.rfind("User:", 0) == 0) {
            role = "user";
            rest = t.substr(5);
        } else if (t.rfind("AI:", 0) == 0) {
            role = "assistant";
            rest = t.substr(3);
        }
        if (role.empty()) {
            if (current_role.empty())
                leading += t;
            else
                current_content += line + "\n";
            continue;
        }
        if (current_role.empty() && !trim(leading).empty())
            fail(errc::bad_format, "text before the first role marker");
        if (current_role == role) fail(errc::repeated_role, "two consecutive " + role + " turns");
        flush();
        current_role = role;
        current_content = rest + "\n";
    }
    flush();
    if (turns.empty()) fail(errc::bad_format, "no role markers found");
    if (turns.front().role != "user") fail(errc::bad_format, "conversation must start with a user turn");
    return turns;
}

QASample parse_qa(const std::string& raw) {
    auto turns = parse_conversation(raw);
    if (turns.size() < 2 || turns[0].role != "user" || turns[1].role != "assistant")
        fail(errc::bad_format, "qa sample needs a user turn followed by an assistant turn");
    QASample s;

    std::istringstream user(turns[0].content);
    std::string line;
    std::string question;
    while (std::getline(user, line)) {
        std::string t = trim(line);
        if (t.size() >= 2 && is_option_letter(t[0]) && t[1] == ':') {
            char letter = t[0];
            if (s.options.count(letter)) fail(errc::bad_format, "duplicate option letter");
            s.options[letter] = trim(t.substr(2));
        } else if (s.options.empty()) {
            if (!question.empty()) question += "\n";
            question += line;
        } else if (!t.empty()) {
            fail(errc::bad_format, "text after the option block");
        }
    }
    s.question = trim(question);
    if (s.options.size() != 4) fail(errc::bad_format, "expected exactly 4 options");

    const std::string& answer = turns[1].content;
    const std::string marker = "The correct answer is ";
    std::size_t pos = answer.find(marker);
    if (pos == std::string::npos || pos + marker.size() + 1 >= answer.size())
        fail(errc::bad_format, "missing answer marker");
    char letter = answer[pos + marker.size()];
    if (!is_option_letter(letter) || answer[pos + marker.size() + 1] != ':')
        fail(errc::bad_format, "answer marker does not name an option");
    s.correct = letter;
    std::size_t line_end = answer.find('\n', pos);
    s.explanation = line_end == std::string::npos ? "" : trim(answer.substr(line_end + 1));
    return s;
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::bad_format: return "BadFormat";
        case RejectReason::repeated_role: return "RepeatedRole";
        case RejectReason::missing_placeholder: return "MissingPlaceholder";
        case RejectReason::bad_uuid: return "BadUUID";
        case RejectReason::unresolved_series: return "UnresolvedSeries";
    }
    return "BadFormat";
}

Verdict validate_sample(const ConversationSample& sample, const std::set<std::string>* known_series) {
    if (sample.turns.empty()) return Verdict::reject(RejectReason::bad_format, "no turns");
    for (const auto& t : sample.turns) {
        if (t.role != "user" && t.role != "assistant")
            return Verdict::reject(RejectReason::bad_format, "unknown role '" + t.role + "'");
        if (trim(t.content).empty()) return Verdict::reject(RejectReason::bad_format, "empty turn content");
    }
    if (sample.turns.front().role != "user")
        return Verdict::reject(RejectReason::bad_format, "conversation must start with a user turn");
    for (std::size_t i = 1; i < sample.turns.size(); ++i) {
        if (sample.turns[i].role == sample.turns[i - 1].role)
            return Verdict::reject(RejectReason::repeated_role, "consecutive " + sample.turns[i].role + " turns");
    }
    std::size_t total = 0;
    for (const auto& t : sample.turns) total += count_occurrences(t.content, kPlaceholder);
    if (total == 0) return Verdict::reject(RejectReason::missing_placeholder, "no [user-input] placeholder");
    if (total != 1 || count_occurrences(sample.turns.front().content, kPlaceholder) != 1)
        return Verdict::reject(RejectReason::bad_format, "placeholder must appear exactly once in the first user turn");
    if (!is_valid_uuid(sample.uuid)) return Verdict::reject(RejectReason::bad_uuid, "sample uuid: " + sample.uuid);
    if (!is_valid_uuid(sample.series_uuid))
        return Verdict::reject(RejectReason::bad_uuid, "series uuid: " + sample.series_uuid);
    if (known_series && !known_series->count(sample.series_uuid))
        return Verdict::reject(RejectReason::unresolved_series, "series uuid not found: " + sample.series_uuid);
    return Verdict::ok();
}

Verdict validate_sample(const QASample& sample, const std::set<std::string>* known_series) {
    if (sample.options.size() != 4) return Verdict::reject(RejectReason::bad_format, "expected exactly 4 options");
    for (char letter : {'A', 'B', 'C', 'D'}) {
        auto it = sample.options.find(letter);
        if (it == sample.options.end() || trim(it->second).empty())
            return Verdict::reject(RejectReason::bad_format, std::string("missing option ") + letter);
    }
    if (!sample.options.count(sample.correct))
        return Verdict::reject(RejectReason::bad_format, "correct letter is not an option");
    std::size_t total = count_occurrences(sample.question, kPlaceholder);
    if (total == 0) return Verdict::reject(RejectReason::missing_placeholder, "no [user-input] placeholder");
    if (total != 1) return Verdict::reject(RejectReason::bad_format, "placeholder must appear exactly once");
    if (!is_valid_uuid(sample.uuid)) return Verdict::reject(RejectReason::bad_uuid, "sample uuid: " + sample.uuid);
    if (!is_valid_uuid(sample.series_uuid))
        return Verdict::reject(RejectReason::bad_uuid, "series uuid: " + sample.series_uuid);
    if (known_series && !known_series->count(sample.series_uuid))
        return Verdict::reject(RejectReason::unresolved_series, "series uuid not found: " + sample.series_uuid);
    return Verdict::ok();
}

LineVerdict validate_corpus_line(const std::string& line, const std::set<std::string>* known_series) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return LineVerdict{"", Verdict::reject(RejectReason::bad_format, "unparseable JSON")};
    std::string uuid = j.value("uuid", "");
    std::string kind = j.value("kind", "conversation");
    try {
        if (kind == "qa") return LineVerdict{uuid, validate_sample(QASample::from_json(line), known_series)};
        if (kind == "conversation")
            return LineVerdict{uuid, validate_sample(ConversationSample::from_json(line), known_series)};
        return LineVerdict{uuid, Verdict::reject(RejectReason::bad_format, "unknown record kind '" + kind + "'")};
    } catch (const Error& e) {
        RejectReason r = e.code() == errc::repeated_role ? RejectReason::repeated_role : RejectReason::bad_format;
        return LineVerdict{uuid, Verdict::reject(r, e.what())};
    }
}

ValidationReport validate_corpus(const std::vector<std::string>& lines, const std::set<std::string>* known_series) {
    ValidationReport report;
    for (const auto& line : lines) {
        auto entry = validate_corpus_line(line, known_series);
        if (entry.verdict.accepted)
            ++report.accepted;
        else
            ++report.rejection_counts[reject_reason_name(*entry.verdict.reason)];
        report.entries.push_back(std::move(entry));
    }
    return report;
}

namespace {

// Rewrites option-letter tokens ("D:") through a 4-letter permutation.
// A letter counts as a token when the previous character is non-alphanumeric
// (or start of text) and the next character is ':'.
std::string rewrite_letters(const std::string& text, const std::array<char, 4>& perm) {
    std::string out = text;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if (!is_option_letter(out[i]) || out[i + 1] != ':') continue;
        if (i > 0 && std::isalnum(static_cast<unsigned char>(out[i - 1]))) continue;
        out[i] = perm[static_cast<std::size_t>(out[i] - 'A')];
    }
    return out;
}

} // namespace

BalancedQA balance_qa(std::vector<QASample> samples, Rng& rng) {
    BalancedQA result;
    std::size_t keep = (samples.size() / 4) * 4;
    result.trimmed = samples.size() - keep;
    samples.resize(keep);

    std::vector<char> targets;
    targets.reserve(keep);
    for (char letter : {'A', 'B', 'C', 'D'})
        for (std::size_t i = 0; i < keep / 4; ++i) targets.push_back(letter);
    rng.shuffle(targets);

    for (std::size_t i = 0; i < keep; ++i) {
        QASample& s = samples[i];
        char target = targets[i];
        char old = s.correct;
        if (old != target) {
            std::swap(s.options[old], s.options[target]);
            std::array<char, 4> perm{'A', 'B', 'C', 'D'};
            perm[static_cast<std::size_t>(old - 'A')] = target;
            perm[static_cast<std::size_t>(target - 'A')] = old;
            s.explanation = rewrite_letters(s.explanation, perm);
            s.correct = target;
        }
    }
    result.samples = std::move(samples);
    return result;
}

std::string TokenRecord::to_json() const {
    json j{{"uuid", uuid}, {"spec_fingerprint", spec_fingerprint}, {"ids", ids}};
    if (!stats_mean.empty()) j["stats"] = {{"mean", stats_mean}, {"std", stats_std}};
    return j.dump();
}

TokenRecord TokenRecord::from_json(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("uuid") || !j.contains("ids"))
        fail(errc::bad_format, "malformed token record");
    TokenRecord r;
    r.uuid = j["uuid"].get<std::string>();
    r.spec_fingerprint = j.value("spec_fingerprint", "");
    r.ids = j["ids"].get<std::vector<std::uint64_t>>();
    if (j.contains("stats")) {
        r.stats_mean = j["stats"]["mean"].get<std::vector<double>>();
        r.stats_std = j["stats"]["std"].get<std::vector<double>>();
    }
    return r;
}

std::string splice_series(const ConversationSample& sample, const TokenRecord& tokens) {
    if (sample.series_uuid != tokens.uuid)
        fail(errc::uuid_mismatch,
             "sample series " + sample.series_uuid + " does not match token record " + tokens.uuid);
    std::string span = "<ts>";
    for (std::size_t i = 0; i < tokens.ids.size(); ++i) {
        if (i > 0) span += ' ';
        span += std::to_string(tokens.ids[i]);
    }
    span += "</ts>";

    json turns_json = json::array();
    for (const auto& t : sample.turns) {
        std::string content = t.content;
        std::size_t pos = content.find(kPlaceholder);
        if (pos != std::string::npos) content.replace(pos, std::string(kPlaceholder).size(), span);
        turns_json.push_back({{"role", t.role}, {"content", content}});
    }
    json j{{"kind", "training"},
           {"uuid", sample.uuid},
           {"task_kind", task_kind_name(sample.task_kind)},
           {"series_uuid", sample.series_uuid},
           {"spec_fingerprint", tokens.spec_fingerprint},
           {"turns", turns_json}};
    return j.dump();
}

std::vector<std::uint64_t> spliced_token_ids(const std::string& training_record_line) {
    json j = json::parse(training_record_line, nullptr, false);
    std::vector<std::uint64_t> ids;
    if (j.is_discarded() || !j.contains("turns")) return ids;
    for (const auto& t : j["turns"]) {
        if (!t.contains("content") || !t["content"].is_string()) continue;
        std::string content = t["content"].get<std::string>();
        std::size_t pos = 0;
        while ((pos = content.find("<ts>", pos)) != std::string::npos) {
            std::size_t end = content.find("</ts>", pos);
            if (end == std::string::npos) break;
            std::istringstream span(content.substr(pos + 4, end - pos - 4));
            std::uint64_t id;
            while (span >> id) ids.push_back(id);
            pos = end + 5;
        }
    }
    return ids;
}

DatasetStats dataset_stats(const std::vector<std::string>& training_record_lines) {
    DatasetStats stats;
    std::vector<std::size_t> per_record_tokens;
    for (const auto& line : training_record_lines) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        ++stats.record_count;
        std::string task = j.value("task_kind", "unknown");
        ++stats.per_task_counts[task];
        auto ids = spliced_token_ids(line);
        for (std::uint64_t id : ids) ++stats.token_histogram[id];
        per_record_tokens.push_back(ids.size());
    }
    if (!per_record_tokens.empty()) {
        std::sort(per_record_tokens.begin(), per_record_tokens.end());
        auto rank = [&](double q) {
            std::size_t n = per_record_tokens.size();
            std::size_t idx = static_cast<std::size_t>(std::max(1.0, std::ceil(q * static_cast<double>(n))));
            return per_record_tokens[idx - 1];
        };
        stats.p50_tokens = rank(0.50);
        stats.p90_tokens = rank(0.90);
        stats.p99_tokens = rank(0.99);
    }
    return stats;
}

std::string DatasetStats::to_json() const {
    json hist = json::object();
    for (const auto& [id, count] : token_histogram) hist[std::to_string(id)] = count;
    json j{{"token_histogram", hist},
           {"per_task_counts", per_task_counts},
           {"record_count", record_count},
           {"length_percentiles", {{"p50", p50_tokens}, {"p90", p90_tokens}, {"p99", p99_tokens}}}};
    return j.dump();
}

std::vector<std::string> read_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

void write_jsonl_file(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    for (const auto& line : lines) out << line << '\n';
}

} // namespace tstok
