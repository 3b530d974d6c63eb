#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tstok/rng.hpp"
#include "tstok/tokenizer.hpp"

namespace tstok {

inline constexpr const char* kPlaceholder = "[user-input]";

enum class TaskKind { general_reasoning, classification, decision_making, math_reasoning, qa };

const char* task_kind_name(TaskKind k);
std::optional<TaskKind> task_kind_from_name(const std::string& name);

struct Turn {
    std::string role; // "user" or "assistant"
    std::string content;

    bool operator==(const Turn&) const = default;
};

struct ConversationSample {
    std::string uuid;
    TaskKind task_kind = TaskKind::general_reasoning;
    std::string series_uuid;
    std::vector<Turn> turns;

    std::string to_json() const;
    static ConversationSample from_json(const std::string& line);
};

struct QASample {
    std::string uuid;
    std::string series_uuid;
    std::string question; // carries the [user-input] placeholder
    std::map<char, std::string> options; // keys A..D
    char correct = 'D';
    std::string explanation;

    std::string to_json() const;
    static QASample from_json(const std::string& line);
};

// Splits generator output on line-leading "User:" / "AI:" markers. AI maps
// to the assistant role, whitespace is trimmed. Throws BadFormat or
// RepeatedRole.
std::vector<Turn> parse_conversation(const std::string& raw);

// Generator output for QA tasks: the user turn carries the question plus
// line-leading "A:".."D:" options, the AI turn answers with
// "The correct answer is X: ..." followed by an optional explanation.
QASample parse_qa(const std::string& raw);

enum class RejectReason { bad_format, repeated_role, missing_placeholder, bad_uuid, unresolved_series };

const char* reject_reason_name(RejectReason r);

struct Verdict {
    bool accepted = false;
    std::optional<RejectReason> reason;
    std::string detail;

    static Verdict ok() { return Verdict{true, std::nullopt, ""}; }
    static Verdict reject(RejectReason r, std::string detail) { return Verdict{false, r, std::move(detail)}; }
};

// known_series == nullptr skips series resolution.
Verdict validate_sample(const ConversationSample& sample, const std::set<std::string>* known_series);
Verdict validate_sample(const QASample& sample, const std::set<std::string>* known_series);

// Validates one raw corpus line, classifying records that fail to
// deserialize as BadFormat rather than throwing.
struct LineVerdict {
    std::string uuid; // empty when the line is unreadable
    Verdict verdict;
};
LineVerdict validate_corpus_line(const std::string& line, const std::set<std::string>* known_series);

struct ValidationReport {
    std::vector<LineVerdict> entries;
    std::size_t accepted = 0;
    std::map<std::string, std::size_t> rejection_counts; // reason name -> count
};
ValidationReport validate_corpus(const std::vector<std::string>& lines, const std::set<std::string>* known_series);

struct BalancedQA {
    std::vector<QASample> samples;
    std::size_t trimmed = 0; // dropped to reach a multiple of 4
};

// Permutes answer letters so each of A..D is correct in exactly n/4 samples.
// Option texts, the correct option text, and questions are preserved; letter
// references in explanations are rewritten through the permutation.
BalancedQA balance_qa(std::vector<QASample> samples, Rng& rng);

struct TokenRecord {
    std::string uuid;
    std::string spec_fingerprint;
    std::vector<std::uint64_t> ids;
    std::vector<double> stats_mean; // optional, empty when absent
    std::vector<double> stats_std;

    std::string to_json() const;
    static TokenRecord from_json(const std::string& line);
};

// Replaces the placeholder with a <ts>...</ts> span carrying the token ids
// and returns the serialized training record.
std::string splice_series(const ConversationSample& sample, const TokenRecord& tokens);

struct DatasetStats {
    std::map<std::uint64_t, std::size_t> token_histogram;
    std::map<std::string, std::size_t> per_task_counts;
    std::size_t record_count = 0;
    std::size_t p50_tokens = 0;
    std::size_t p90_tokens = 0;
    std::size_t p99_tokens = 0;

    std::string to_json() const;
};

// ids inside <ts>...</ts> spans of a training record's turns.
std::vector<std::uint64_t> spliced_token_ids(const std::string& training_record_line);

DatasetStats dataset_stats(const std::vector<std::string>& training_record_lines);

std::vector<std::string> read_jsonl_file(const std::string& path);
void write_jsonl_file(const std::string& path, const std::vector<std::string>& lines);

} // namespace tstok
