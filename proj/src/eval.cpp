#include "tstok/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "tstok/errors.hpp"

namespace tstok {

namespace {

bool is_choice_letter(char c) { return c == 'A' || c == 'B' || c == 'C' || c == 'D'; }

bool colon_then_break(const std::string& s, std::size_t letter_pos) {
    if (letter_pos + 1 >= s.size() || s[letter_pos + 1] != ':') return false;
    return letter_pos + 2 >= s.size() || std::isspace(static_cast<unsigned char>(s[letter_pos + 2]));
}

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    if (values.empty()) return a;
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - a.mean) * (v - a.mean);
    a.stddev = std::sqrt(var / static_cast<double>(values.size()));
    return a;
}

} // namespace

ChoiceExtraction extract_choice(const std::string& response) {
    // rule 1: answer phrase
    static const std::string phrase = "The correct answer is ";
    for (std::size_t pos = response.find(phrase); pos != std::string::npos;
         pos = response.find(phrase, pos + 1)) {
        std::size_t letter = pos + phrase.size();
        if (letter + 1 < response.size() && is_choice_letter(response[letter]) && response[letter + 1] == ':')
            return ChoiceExtraction{response[letter], letter};
    }
    // rule 2: line-leading letter
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (i != 0 && response[i - 1] != '\n') continue;
        std::size_t j = i;
        while (j < response.size() && (response[j] == ' ' || response[j] == '\t')) ++j;
        if (j < response.size() && is_choice_letter(response[j]) && colon_then_break(response, j))
            return ChoiceExtraction{response[j], j};
    }
    // rule 3: standalone letter anywhere
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (!is_choice_letter(response[i]) || !colon_then_break(response, i)) continue;
        std::size_t back = i;
        while (back > 0 && (response[back - 1] == ' ' || response[back - 1] == '\t')) --back;
        if (back == 0 || !std::isalnum(static_cast<unsigned char>(response[back - 1])))
            return ChoiceExtraction{response[i], i};
    }
    return ChoiceExtraction{};
}

QAReport score_qa(const std::vector<QASample>& samples, const std::map<ResponseKey, std::string>& responses,
                  const std::vector<std::string>& prompt_ids) {
    QAReport report;
    std::vector<double> corrects, wrongs, nulls;
    for (const auto& prompt_id : prompt_ids) {
        PromptScore score;
        score.prompt_id = prompt_id;
        score.total = samples.size();
        for (const auto& sample : samples) {
            auto it = responses.find({sample.uuid, prompt_id});
            if (it == responses.end())
                fail(errc::missing_response, "no response for sample " + sample.uuid + " under prompt " + prompt_id);
            auto extraction = extract_choice(it->second);
            if (!extraction.verdict)
                ++score.null_count;
            else if (*extraction.verdict == sample.correct)
                ++score.correct;
            else
                ++score.wrong;
        }
        if (score.total > 0) {
            score.correct_pct = 100.0 * static_cast<double>(score.correct) / static_cast<double>(score.total);
            score.wrong_pct = 100.0 * static_cast<double>(score.wrong) / static_cast<double>(score.total);
            score.null_pct = 100.0 - score.correct_pct - score.wrong_pct;
        }
        corrects.push_back(score.correct_pct);
        wrongs.push_back(score.wrong_pct);
        nulls.push_back(score.null_pct);
        report.per_prompt.push_back(std::move(score));
    }
    report.correct_agg = aggregate(corrects);
    report.wrong_agg = aggregate(wrongs);
    report.null_agg = aggregate(nulls);
    return report;
}

std::string qa_report_csv(const std::string& model, const QAReport& report) {
    std::ostringstream out;
    out << "model,prompt_id,correct_pct,wrong_pct,null_pct\n";
    out.precision(10);
    for (const auto& row : report.per_prompt)
        out << model << ',' << row.prompt_id << ',' << row.correct_pct << ',' << row.wrong_pct << ','
            << row.null_pct << '\n';
    return out.str();
}

std::optional<std::array<int, 4>> parse_judge_line(const std::string& text) {
    std::array<int, 4> scores{};
    for (std::size_t m = 0; m < kJudgeMetrics.size(); ++m) {
        std::string key = std::string(kJudgeMetrics[m]) + "=";
        std::size_t pos = text.find(key);
        if (pos == std::string::npos) return std::nullopt;
        std::size_t digit = pos + key.size();
        if (digit >= text.size() || !std::isdigit(static_cast<unsigned char>(text[digit]))) return std::nullopt;
        int value = text[digit] - '0';
        // two-digit values and 0 are out of the 1..5 scale
        if (digit + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[digit + 1]))) return std::nullopt;
        if (value < 1 || value > 5) return std::nullopt;
        scores[m] = value;
    }
    return scores;
}

JudgeScores judge_score(GeneratorTransport& transport, const QASample& sample, const std::string& response,
                        const std::string& rubric_template, const std::string& model, std::uint64_t seed) {
    std::string ground_truth = sample.options.count(sample.correct)
                                    ? sample.options.at(sample.correct) +
                                          (sample.explanation.empty() ? "" : " " + sample.explanation)
                                    : sample.explanation;
    std::string rubric = rubric_template;
    auto interpolate = [&rubric](const std::string& token, const std::string& value) {
        for (std::size_t pos = rubric.find(token); pos != std::string::npos; pos = rubric.find(token, pos + value.size()))
            rubric.replace(pos, token.size(), value);
    };
    interpolate("{question}", sample.question);
    interpolate("{ground_truth}", ground_truth);
    interpolate("{response}", response);

    JudgeScores result;
    for (std::uint64_t replicate = 0; replicate < 3; ++replicate) {
        std::optional<std::array<int, 4>> parsed;
        for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
            GenerationJob job;
            job.template_id = "judge";
            job.system_text = rubric;
            job.metadata = {{"sample", sample.uuid}, {"replicate", replicate}, {"attempt", attempt}};
            job.model = model;
            job.temperature = 0.0;
            job.seed = seed + replicate * 2 + static_cast<std::uint64_t>(attempt);
            parsed = parse_judge_line(transport.generate(job));
        }
        if (parsed)
            result.replicates.push_back(*parsed);
        else
            ++result.missing;
    }
    if (result.replicates.empty())
        fail(errc::all_replicates_unparseable, "judge produced no parseable replicate for sample " + sample.uuid);
    for (std::size_t m = 0; m < kJudgeMetrics.size(); ++m) {
        std::vector<double> values;
        values.reserve(result.replicates.size());
        for (const auto& r : result.replicates) values.push_back(static_cast<double>(r[m]));
        Aggregate agg = aggregate(values);
        result.mean[m] = agg.mean;
        result.stddev[m] = agg.stddev;
    }
    return result;
}

std::map<std::string, int> rank_points(const std::map<std::string, double>& model_overall_means) {
    std::vector<std::pair<std::string, double>> order(model_overall_means.begin(), model_overall_means.end());
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::map<std::string, int> points;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && order[j].second == order[i].second) ++j;
        int value = 0;
        if (i == 0) value = 3;      // ties share the higher point value
        else if (i == 1) value = 2;
        else if (i == 2) value = 1;
        for (std::size_t k = i; k < j; ++k) points[order[k].first] = value;
        i = j;
    }
    return points;
}

} // namespace tstok
