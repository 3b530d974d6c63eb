#include <cmath>

#include "doctest.h"
#include "tstok/errors.hpp"
#include "tstok/patch_vq.hpp"
#include "tstok/rng.hpp"

using namespace tstok;

namespace {

std::vector<TimeSeries> make_corpus() {
    Rng rng(77);
    std::vector<std::vector<double>> channels(2, std::vector<double>(256));
    for (auto& ch : channels)
        for (auto& v : ch) v = rng.uniform_real(-2.0, 2.0);
    return {TimeSeries::from_channels(channels)};
}

} // namespace

TEST_CASE("k-means on separable clusters converges to the cluster means") {
    // patches {[0,0] x2, [1,1] x2}
    auto corpus = std::vector<TimeSeries>{TimeSeries::from_channels({{0, 0, 1, 1, 0, 0, 1, 1}})};
    auto book = train_patch_vq(corpus, 2, 2, 50, 123);
    REQUIRE(book.codewords.size() == 2);
    CHECK(book.codewords[0][0] == doctest::Approx(0.0));
    CHECK(book.codewords[0][1] == doctest::Approx(0.0));
    CHECK(book.codewords[1][0] == doctest::Approx(1.0));
    CHECK(book.codewords[1][1] == doctest::Approx(1.0));
}

TEST_CASE("a single codeword is the mean patch") {
    auto corpus = std::vector<TimeSeries>{TimeSeries::from_channels({{0, 2, 4, 6}})};
    auto book = train_patch_vq(corpus, 2, 1, 50, 9);
    REQUIRE(book.codewords.size() == 1);
    // brute-force mean of patches [0,2] and [4,6]
    CHECK(book.codewords[0][0] == doctest::Approx(2.0));
    CHECK(book.codewords[0][1] == doctest::Approx(4.0));
}

TEST_CASE("too little data is rejected") {
    auto corpus = std::vector<TimeSeries>{TimeSeries::from_channels({{1, 2, 3}})};
    CHECK_THROWS_WITH_AS(train_patch_vq(corpus, 8, 1, 50, 1), doctest::Contains("InsufficientData"), Error);
    CHECK_THROWS_AS(train_patch_vq(corpus, 1, 4, 50, 1), Error); // 3 patches < 4 codewords
}

TEST_CASE("training is deterministic given the seed") {
    auto corpus = make_corpus();
    auto a = train_patch_vq(corpus, 4, 8, 50, 42);
    auto b = train_patch_vq(corpus, 4, 8, 50, 42);
    CHECK(a.codewords == b.codewords);
}

TEST_CASE("encode picks the nearest codeword, ties to the lowest index") {
    PatchCodebook book;
    book.patch_length = 2;
    book.codewords = {{0, 0}, {1, 1}};
    auto enc = vq_encode(TimeSeries::from_channels({{0.1, 0.1, 0.9, 1.1}}), book);
    CHECK(enc.tokens.ids == std::vector<std::uint64_t>{0, 1, 2}); // separator id = 2
    CHECK(enc.padding == std::vector<std::uint32_t>{0});

    auto tie = vq_encode(TimeSeries::from_channels({{0.5, 0.5}}), book);
    CHECK(tie.tokens.ids.front() == 0);
}

TEST_CASE("decode concatenates codewords") {
    PatchCodebook book;
    book.patch_length = 2;
    book.codewords = {{0, 0}, {1, 1}};
    auto series = vq_decode(std::vector<std::uint64_t>{0, 1}, book);
    CHECK(series.values() == std::vector<double>{0, 0, 1, 1});
    CHECK_THROWS_WITH_AS(vq_decode(std::vector<std::uint64_t>{0, 9}, book), doctest::Contains("UnknownToken"),
                         Error);
}

TEST_CASE("odd lengths pad with the last value and trim on decode") {
    PatchCodebook book;
    book.patch_length = 4;
    book.codewords = {{0, 0, 0, 0}, {1, 1, 1, 1}};
    auto enc = vq_encode(TimeSeries::from_channels({{1, 1, 1}}), book);
    CHECK(enc.padding == std::vector<std::uint32_t>{1});
    CHECK(enc.tokens.ids == std::vector<std::uint64_t>{1, 2});
    auto back = vq_decode(enc, book);
    CHECK(back.length() == 3);
    CHECK(back.values() == std::vector<double>{1, 1, 1});
}

TEST_CASE("codebook JSON round trips") {
    PatchCodebook book;
    book.patch_length = 2;
    book.codewords = {{0.5, -1.25}, {3, 4}};
    auto back = PatchCodebook::from_json(book.to_json());
    CHECK(back.patch_length == 2);
    CHECK(back.codewords == book.codewords);
    CHECK_THROWS_AS(PatchCodebook::from_json("{}"), Error);
}
