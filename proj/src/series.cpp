#include "tstok/series.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tstok/errors.hpp"

namespace tstok {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'K', '1'};
constexpr double kConstantStdFloor = 1e-12;

void check_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) fail(errc::non_finite_input, "series contains NaN or infinite values");
    }
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) fail(errc::io_error, "truncated series container");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(bits >> (8 * i));
    out.write(b, 8);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) fail(errc::io_error, "truncated series container");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

TimeSeries::TimeSeries(std::size_t length, std::size_t channels, std::vector<double> channel_major_values)
    : length_(length), channels_(channels), values_(std::move(channel_major_values)) {
    if (length_ < 1 || channels_ < 1) fail(errc::shape_mismatch, "series must have L >= 1 and M >= 1");
    if (values_.size() != length_ * channels_)
        fail(errc::shape_mismatch, "value count does not match L*M");
    check_finite(values_);
}

TimeSeries TimeSeries::from_channels(const std::vector<std::vector<double>>& channels) {
    if (channels.empty()) fail(errc::shape_mismatch, "series must have at least one channel");
    std::size_t length = channels.front().size();
    std::vector<double> values;
    values.reserve(length * channels.size());
    for (const auto& ch : channels) {
        if (ch.size() != length) fail(errc::shape_mismatch, "channels have unequal lengths");
        values.insert(values.end(), ch.begin(), ch.end());
    }
    return TimeSeries(length, channels.size(), std::move(values));
}

NormalizedSeries normalize(const TimeSeries& series) {
    const std::size_t L = series.length();
    const std::size_t M = series.channels();
    NormalizationStats stats;
    stats.mean.resize(M);
    stats.std.resize(M);
    std::vector<double> out(L * M);
    for (std::size_t c = 0; c < M; ++c) {
        auto ch = series.channel(c);
        double sum = 0.0;
        for (double v : ch) sum += v;
        double mean = sum / static_cast<double>(L);
        double var = 0.0;
        for (double v : ch) var += (v - mean) * (v - mean);
        var /= static_cast<double>(L); // population variance
        double sd = std::sqrt(var);
        if (sd < kConstantStdFloor) {
            stats.mean[c] = mean;
            stats.std[c] = 1.0;
            for (std::size_t t = 0; t < L; ++t) out[c * L + t] = 0.0;
        } else {
            stats.mean[c] = mean;
            stats.std[c] = sd;
            for (std::size_t t = 0; t < L; ++t) out[c * L + t] = (ch[t] - mean) / sd;
        }
    }
    return NormalizedSeries{TimeSeries(L, M, std::move(out)), std::move(stats)};
}

TimeSeries denormalize(const TimeSeries& series, const NormalizationStats& stats) {
    const std::size_t L = series.length();
    const std::size_t M = series.channels();
    if (stats.mean.size() != M || stats.std.size() != M)
        fail(errc::shape_mismatch, "stats channel count does not match series");
    std::vector<double> out(L * M);
    for (std::size_t c = 0; c < M; ++c) {
        auto ch = series.channel(c);
        for (std::size_t t = 0; t < L; ++t) out[c * L + t] = ch[t] * stats.std[c] + stats.mean[c];
    }
    return TimeSeries(L, M, std::move(out));
}

void write_tsk(std::ostream& out, const TimeSeries& series) {
    out.write(kMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(series.length()));
    put_u32(out, static_cast<std::uint32_t>(series.channels()));
    for (double v : series.values()) put_f64(out, v);
    if (!out) fail(errc::io_error, "failed writing series container");
}

TimeSeries read_tsk(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(errc::io_error, "bad series container magic");
    std::uint32_t L = get_u32(in);
    std::uint32_t M = get_u32(in);
    if (L < 1 || M < 1) fail(errc::io_error, "bad series container shape");
    std::vector<double> values(static_cast<std::size_t>(L) * M);
    for (auto& v : values) v = get_f64(in);
    return TimeSeries(L, M, std::move(values));
}

void write_tsk_file(const std::string& path, const TimeSeries& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    write_tsk(out, series);
}

TimeSeries read_tsk_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open: " + path);
    return read_tsk(in);
}

TimeSeries read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v = 0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                numeric = false;
            }
            while (numeric && pos < cell.size()) {
                if (!std::isspace(static_cast<unsigned char>(cell[pos]))) numeric = false;
                ++pos;
            }
            row.push_back(v);
        }
        if (!numeric) {
            // a non-numeric first row is a header; anywhere else it is an error
            if (!header_checked && rows.empty()) {
                header_checked = true;
                continue;
            }
            fail(errc::parse_error, "non-numeric CSV cell at line " + std::to_string(line_no));
        }
        header_checked = true;
        if (width == 0) width = row.size();
        if (row.size() != width) fail(errc::parse_error, "ragged CSV row at line " + std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty() || width == 0) fail(errc::parse_error, "empty CSV input");
    std::vector<double> values(rows.size() * width);
    for (std::size_t c = 0; c < width; ++c)
        for (std::size_t t = 0; t < rows.size(); ++t) values[c * rows.size() + t] = rows[t][c];
    return TimeSeries(rows.size(), width, std::move(values));
}

TimeSeries read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open: " + path);
    return read_csv(in);
}

TimeSeries read_series_file(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_csv_file(path);
    return read_tsk_file(path);
}

} // namespace tstok
