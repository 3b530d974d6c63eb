#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "tstok/dataset.hpp"
#include "tstok/errors.hpp"
#include "tstok/tokenizer.hpp"

using namespace tstok;

namespace {

ConversationSample good_sample() {
    ConversationSample s;
    s.uuid = "11111111-0000-4000-8000-000000000001";
    s.series_uuid = "11111111-0000-4000-8000-000000000002";
    s.task_kind = TaskKind::general_reasoning;
    s.turns = {{"user", "data: [user-input]"}, {"assistant", "looks stable"}};
    return s;
}

QASample good_qa(char correct = 'D') {
    QASample s;
    s.uuid = "22222222-0000-4000-8000-000000000001";
    s.series_uuid = "22222222-0000-4000-8000-000000000002";
    s.question = "What explains the trend? [user-input]";
    s.options = {{'A', "alpha"}, {'B', "beta"}, {'C', "gamma"}, {'D', "delta"}};
    s.correct = correct;
    s.explanation = "The correct answer is D: delta fits the shape.";
    return s;
}

} // namespace

TEST_CASE("parse_conversation splits role markers") {
    auto turns = parse_conversation("User: hi [user-input]\nAI: hello");
    REQUIRE(turns.size() == 2);
    CHECK(turns[0].role == "user");
    CHECK(turns[0].content == "hi [user-input]");
    CHECK(turns[1].role == "assistant");
    CHECK(turns[1].content == "hello");
}

TEST_CASE("parse_conversation rejects assistant-first and repeated roles") {
    CHECK_THROWS_WITH_AS(parse_conversation("AI: hello"), doctest::Contains("BadFormat"), Error);
    CHECK_THROWS_WITH_AS(parse_conversation("User: a\nUser: b\nAI: c"), doctest::Contains("RepeatedRole"), Error);
    CHECK_THROWS_AS(parse_conversation("no markers at all"), Error);
    CHECK_THROWS_AS(parse_conversation("User: \nAI: x"), Error); // empty turn
}

TEST_CASE("multi-line turns keep their content") {
    auto turns = parse_conversation("User: first line [user-input]\nmore context\nAI: reply\nwith detail");
    REQUIRE(turns.size() == 2);
    CHECK(turns[0].content == "first line [user-input]\nmore context");
    CHECK(turns[1].content == "reply\nwith detail");
}

TEST_CASE("parse_qa extracts question, options, answer, explanation") {
    std::string raw =
        "User: Context here. What fits? [user-input]\nA: one\nB: two\nC: three\nD: four\n"
        "AI: The correct answer is D: four\nBecause the trend says so.";
    auto qa = parse_qa(raw);
    CHECK(qa.question == "Context here. What fits? [user-input]");
    CHECK(qa.options.at('A') == "one");
    CHECK(qa.options.at('D') == "four");
    CHECK(qa.correct == 'D');
    CHECK(qa.explanation == "Because the trend says so.");
    CHECK_THROWS_AS(parse_qa("User: q [user-input]\nA: one\nB: two\nAI: The correct answer is A: one"), Error);
}

TEST_CASE("validation accepts the well-formed sample") {
    auto verdict = validate_sample(good_sample(), nullptr);
    CHECK(verdict.accepted);
}

TEST_CASE("validation reports the first failing rule") {
    auto missing = good_sample();
    missing.turns[0].content = "data:";
    auto v1 = validate_sample(missing, nullptr);
    REQUIRE(!v1.accepted);
    CHECK(*v1.reason == RejectReason::missing_placeholder);

    auto bad_uuid = good_sample();
    bad_uuid.uuid = "not-a-uuid";
    auto v2 = validate_sample(bad_uuid, nullptr);
    REQUIRE(!v2.accepted);
    CHECK(*v2.reason == RejectReason::bad_uuid);

    auto repeated = good_sample();
    repeated.turns = {{"user", "[user-input]"}, {"user", "again"}, {"assistant", "ok"}};
    auto v3 = validate_sample(repeated, nullptr);
    REQUIRE(!v3.accepted);
    CHECK(*v3.reason == RejectReason::repeated_role);

    auto doubled = good_sample();
    doubled.turns[0].content = "[user-input] [user-input]";
    auto v4 = validate_sample(doubled, nullptr);
    REQUIRE(!v4.accepted);
    CHECK(*v4.reason == RejectReason::bad_format);

    auto misplaced = good_sample();
    misplaced.turns[0].content = "no placeholder here";
    misplaced.turns[1].content = "reply [user-input]";
    auto v5 = validate_sample(misplaced, nullptr);
    REQUIRE(!v5.accepted);
    CHECK(*v5.reason == RejectReason::bad_format);

    std::set<std::string> known{"33333333-0000-4000-8000-000000000003"};
    auto unresolved = good_sample();
    auto v6 = validate_sample(unresolved, &known);
    REQUIRE(!v6.accepted);
    CHECK(*v6.reason == RejectReason::unresolved_series);
}

TEST_CASE("records round trip through JSON") {
    auto s = good_sample();
    auto back = ConversationSample::from_json(s.to_json());
    CHECK(back.uuid == s.uuid);
    CHECK(back.series_uuid == s.series_uuid);
    CHECK(back.task_kind == s.task_kind);
    CHECK(back.turns == s.turns);
    CHECK(back.to_json() == s.to_json());

    auto qa = good_qa();
    auto qa_back = QASample::from_json(qa.to_json());
    CHECK(qa_back.options == qa.options);
    CHECK(qa_back.correct == qa.correct);
    CHECK(qa_back.to_json() == qa.to_json());
}

TEST_CASE("bundled validator fixture yields one rejection per class") {
    auto lines = read_jsonl_file(std::string(TSTOK_FIXTURES_DIR) + "/validator/corpus.jsonl");
    REQUIRE(lines.size() == 20);
    std::set<std::string> known;
    for (const auto& line : read_jsonl_file(std::string(TSTOK_FIXTURES_DIR) + "/validator/segments.jsonl")) {
        known.insert(nlohmann::json::parse(line)["uuid"].get<std::string>());
    }
    auto report = validate_corpus(lines, &known);
    CHECK(report.accepted == 15);
    CHECK(report.rejection_counts.size() == 5);
    for (const char* reason : {"BadFormat", "RepeatedRole", "MissingPlaceholder", "BadUUID", "UnresolvedSeries"})
        CHECK(report.rejection_counts.at(reason) == 1);
}

TEST_CASE("balance_qa forces equal letter counts") {
    Rng rng(3);
    std::vector<QASample> samples;
    for (int i = 0; i < 8; ++i) {
        auto s = good_qa('D');
        s.uuid[0] = static_cast<char>('a' + i);
        samples.push_back(s);
    }
    auto balanced = balance_qa(samples, rng);
    CHECK(balanced.trimmed == 0);
    std::map<char, int> counts;
    for (const auto& s : balanced.samples) ++counts[s.correct];
    CHECK(counts['A'] == 2);
    CHECK(counts['B'] == 2);
    CHECK(counts['C'] == 2);
    CHECK(counts['D'] == 2);
}

TEST_CASE("balance_qa relabels consistently") {
    Rng rng(4);
    QASample s = good_qa('D');
    s.options['D'] = "X";
    // force a known target by balancing a single group of 4 identical samples
    std::vector<QASample> group(4, s);
    auto balanced = balance_qa(group, rng);
    bool saw_b = false;
    for (const auto& out : balanced.samples) {
        CHECK(out.options.at(out.correct) == "X"); // correct text follows the letter
        CHECK(out.question == s.question);
        std::multiset<std::string> texts;
        for (const auto& [letter, text] : out.options) texts.insert(text);
        CHECK(texts == std::multiset<std::string>{"alpha", "beta", "gamma", "X"});
        if (out.correct == 'B') {
            saw_b = true;
            CHECK(out.explanation == "The correct answer is B: delta fits the shape.");
        }
    }
    CHECK(saw_b); // every letter appears once across 4 samples
}

TEST_CASE("balance_qa trims to a multiple of four") {
    Rng rng(5);
    std::vector<QASample> samples(7, good_qa('A'));
    auto balanced = balance_qa(samples, rng);
    CHECK(balanced.trimmed == 3);
    CHECK(balanced.samples.size() == 4);
}

TEST_CASE("splice replaces the placeholder with the token span") {
    auto sample = good_sample();
    TokenRecord tokens;
    tokens.uuid = sample.series_uuid;
    tokens.spec_fingerprint = "abc";
    tokens.ids = {100, 105};
    auto record = splice_series(sample, tokens);
    CHECK(record.find("data: <ts>100 105</ts>") != std::string::npos);
    CHECK(record.find("[user-input]") == std::string::npos);

    TokenRecord wrong = tokens;
    wrong.uuid = "44444444-0000-4000-8000-000000000004";
    CHECK_THROWS_WITH_AS(splice_series(sample, wrong), doctest::Contains("UUIDMismatch"), Error);
}

TEST_CASE("token records round trip with optional stats") {
    TokenRecord r;
    r.uuid = "uuid-1";
    r.spec_fingerprint = "fp";
    r.ids = {1, 2, 3};
    r.stats_mean = {0.5};
    r.stats_std = {2.0};
    auto back = TokenRecord::from_json(r.to_json());
    CHECK(back.ids == r.ids);
    CHECK(back.stats_mean == r.stats_mean);
    CHECK(back.stats_std == r.stats_std);
}

TEST_CASE("dataset stats count tokens and tasks") {
    auto sample = good_sample();
    TokenRecord tokens;
    tokens.uuid = sample.series_uuid;
    tokens.ids = {0, 0, 1, 4};
    auto record = splice_series(sample, tokens);
    auto stats = dataset_stats({record});
    CHECK(stats.token_histogram.at(0) == 2);
    CHECK(stats.token_histogram.at(1) == 1);
    CHECK(stats.token_histogram.at(4) == 1);
    CHECK(stats.per_task_counts.at("general_reasoning") == 1);
    CHECK(stats.record_count == 1);
    CHECK(stats.p50_tokens == 4);
}

TEST_CASE("token histogram of a gaussian corpus peaks near the middle bin") {
    Rng rng(6);
    TokenizerSpec spec{1024, 3.0, 0, true};
    std::vector<double> values(20000);
    for (auto& v : values) {
        double g = 0;
        for (int k = 0; k < 12; ++k) g += rng.uniform_real(0.0, 1.0);
        v = g - 6.0;
    }
    auto tokens = encode(TimeSeries::from_channels({values}), spec);
    std::map<std::uint64_t, std::size_t> hist;
    for (auto id : tokens.ids)
        if (id != spec.separator_id()) ++hist[id];
    std::uint64_t mode = 0;
    std::size_t best = 0;
    for (const auto& [id, count] : hist) {
        if (count > best) {
            best = count;
            mode = id;
        }
    }
    double mid = (spec.K - 1) / 2.0;
    CHECK(std::abs(static_cast<double>(mode) - mid) <= 0.05 * spec.K);

    std::size_t total = 0;
    for (const auto& [id, count] : hist) total += count;
    CHECK(total == values.size());
}
