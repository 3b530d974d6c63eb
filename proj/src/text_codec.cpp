#include "tstok/text_codec.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "tstok/errors.hpp"

namespace tstok {

namespace {

constexpr double kOverflowBound = 1e15;

double pow10(std::uint32_t p) {
    double v = 1.0;
    for (std::uint32_t i = 0; i < p; ++i) v *= 10.0;
    return v;
}

} // namespace

void TextCodecSpec::validate() const {
    if (precision > 10) fail(errc::spec_invalid, "precision must be <= 10");
}

std::string text_encode(const TimeSeries& series, const TextCodecSpec& spec) {
    spec.validate();
    std::string out;
    for (std::size_t c = 0; c < series.channels(); ++c) {
        if (c > 0) out += " ; ";
        auto ch = series.channel(c);
        for (std::size_t t = 0; t < ch.size(); ++t) {
            if (t > 0) out += " , ";
            double scaled = ch[t] * pow10(spec.precision);
            if (std::abs(scaled) >= kOverflowBound)
                fail(errc::overflow, "scaled value exceeds 10^15 at precision " + std::to_string(spec.precision));
            long long v = std::llround(scaled); // half away from zero
            std::string digits = std::to_string(v < 0 ? -v : v);
            while (digits.size() < spec.precision) digits.insert(digits.begin(), '0');
            if (v < 0) out += "- ";
            for (std::size_t i = 0; i < digits.size(); ++i) {
                if (i > 0) out += ' ';
                out += digits[i];
            }
        }
    }
    return out;
}

TimeSeries text_decode(const std::string& text, const TextCodecSpec& spec) {
    spec.validate();
    std::vector<std::string> symbols;
    {
        std::stringstream ss(text);
        std::string sym;
        while (ss >> sym) symbols.push_back(sym);
    }
    std::vector<std::vector<double>> channels(1);
    bool negative = false;
    std::string digits;
    auto flush_value = [&](std::size_t pos) {
        if (digits.empty()) fail(errc::parse_error, "expected digits before symbol " + std::to_string(pos));
        long long v = std::strtoll(digits.c_str(), nullptr, 10);
        channels.back().push_back((negative ? -v : v) / pow10(spec.precision));
        negative = false;
        digits.clear();
    };
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const std::string& sym = symbols[i];
        if (sym == ",") {
            flush_value(i);
        } else if (sym == ";") {
            flush_value(i);
            channels.emplace_back();
        } else if (sym == "-") {
            if (negative || !digits.empty()) fail(errc::parse_error, "misplaced sign at symbol " + std::to_string(i));
            negative = true;
        } else if (sym.size() == 1 && sym[0] >= '0' && sym[0] <= '9') {
            if (digits.size() >= 17) fail(errc::parse_error, "digit run too long at symbol " + std::to_string(i));
            digits += sym;
        } else {
            fail(errc::parse_error, "unexpected symbol '" + sym + "' at position " + std::to_string(i));
        }
    }
    if (symbols.empty()) fail(errc::parse_error, "empty input");
    flush_value(symbols.size());
    std::size_t width = channels.front().size();
    for (const auto& ch : channels) {
        if (ch.size() != width) fail(errc::parse_error, "channels decode to unequal lengths");
    }
    return TimeSeries::from_channels(channels);
}

std::size_t text_symbol_count(const std::string& text) {
    std::stringstream ss(text);
    std::string sym;
    std::size_t n = 0;
    while (ss >> sym) ++n;
    return n;
}

} // namespace tstok
