#pragma once

#include <cstdint>
#include <string>

#include "tstok/series.hpp"

namespace tstok {

// Digit-text rendering: each value is scaled by 10^precision, rounded half
// away from zero, zero-padded to at least `precision` digits, and written as
// space-separated symbols. Values are joined by " , ", channels by " ; ",
// negatives carry a "- " prefix. Every symbol is whitespace-delimited, which
// keeps symbol counting trivial for the benchmark.
struct TextCodecSpec {
    std::uint32_t precision = 2;

    void validate() const;
};

std::string text_encode(const TimeSeries& series, const TextCodecSpec& spec);
TimeSeries text_decode(const std::string& text, const TextCodecSpec& spec);

// Whitespace-delimited symbol count of an encoded string.
std::size_t text_symbol_count(const std::string& text);

} // namespace tstok
