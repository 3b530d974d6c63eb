#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tstok/dataset.hpp"
#include "tstok/generator.hpp"

namespace tstok {

struct ChoiceExtraction {
    std::optional<char> verdict; // 'A'..'D', nullopt when nothing matched
    std::size_t offset = std::string::npos; // offset of the matched letter
};

// Cascade: (1) first "The correct answer is X:", (2) first line-leading
// "X:", (3) first standalone "X:" anywhere. Case-sensitive; the letter must
// be followed by ':'. Standalone means the previous non-blank character is
// not alphanumeric and the colon is followed by whitespace or end, so the
// "A:, B:, C:, or D:" enumerations inside the shipped system prompts do not
// match.
ChoiceExtraction extract_choice(const std::string& response);

struct PromptScore {
    std::string prompt_id;
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t wrong = 0;
    std::size_t null_count = 0;
    double correct_pct = 0.0;
    double wrong_pct = 0.0;
    double null_pct = 0.0; // computed as 100 - correct - wrong so rows sum exactly
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0; // population
};

struct QAReport {
    std::vector<PromptScore> per_prompt;
    Aggregate correct_agg;
    Aggregate wrong_agg;
    Aggregate null_agg;
};

using ResponseKey = std::pair<std::string, std::string>; // (sample uuid, prompt id)

QAReport score_qa(const std::vector<QASample>& samples, const std::map<ResponseKey, std::string>& responses,
                  const std::vector<std::string>& prompt_ids);

// CSV rows "model,prompt_id,correct_pct,wrong_pct,null_pct".
std::string qa_report_csv(const std::string& model, const QAReport& report);

inline constexpr std::array<const char*, 4> kJudgeMetrics{"overall", "helpfulness", "relevance", "accuracy"};

struct JudgeScores {
    std::vector<std::array<int, 4>> replicates; // parsed replicate scores, 1..5 each
    std::size_t missing = 0;                    // replicates that stayed unparseable after one retry
    std::array<double, 4> mean{};
    std::array<double, 4> stddev{}; // population, over present replicates
};

// Three judge calls against the rubric (question, ground truth, and the
// candidate response interpolated). Replicates whose output lacks the
// mandated "overall=<n> helpfulness=<n> relevance=<n> accuracy=<n>" line are
// retried once and then recorded missing.
JudgeScores judge_score(GeneratorTransport& transport, const QASample& sample, const std::string& response,
                        const std::string& rubric_template, const std::string& model, std::uint64_t seed);

std::optional<std::array<int, 4>> parse_judge_line(const std::string& text);

// Ranking points: sort by mean descending; positions 1..3 earn 3/2/1 points,
// ties share the higher value.
std::map<std::string, int> rank_points(const std::map<std::string, double>& model_overall_means);

} // namespace tstok
