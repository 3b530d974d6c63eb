#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tstok {

// An L x M series (L timesteps, M channels) stored channel-major: channel 0
// fully, then channel 1, etc. Values are validated finite at construction.
class TimeSeries {
public:
    TimeSeries(std::size_t length, std::size_t channels, std::vector<double> channel_major_values);

    static TimeSeries from_channels(const std::vector<std::vector<double>>& channels);

    std::size_t length() const { return length_; }
    std::size_t channels() const { return channels_; }
    std::size_t size() const { return values_.size(); }

    double at(std::size_t t, std::size_t channel) const { return values_[channel * length_ + t]; }
    std::span<const double> channel(std::size_t c) const {
        return std::span<const double>(values_).subspan(c * length_, length_);
    }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const TimeSeries&) const = default;

private:
    std::size_t length_;
    std::size_t channels_;
    std::vector<double> values_; // channel-major
};

struct NormalizationStats {
    std::vector<double> mean; // one per channel
    std::vector<double> std;  // one per channel, >= 0; 1 for constant channels

    bool operator==(const NormalizationStats&) const = default;
};

struct NormalizedSeries {
    TimeSeries series;
    NormalizationStats stats;
};

// Per-channel z-score with population std. Channels with std < 1e-12 are
// treated as constant: output zeros, std recorded as 1 so inversion is exact.
NormalizedSeries normalize(const TimeSeries& series);

TimeSeries denormalize(const TimeSeries& series, const NormalizationStats& stats);

// Flat binary container: magic "TSK1", u32 L, u32 M, then L*M little-endian
// f64 in channel-major order.
void write_tsk(std::ostream& out, const TimeSeries& series);
TimeSeries read_tsk(std::istream& in);
void write_tsk_file(const std::string& path, const TimeSeries& series);
TimeSeries read_tsk_file(const std::string& path);

// CSV ingestion: one column per channel, rows are timesteps, header optional.
TimeSeries read_csv(std::istream& in);
TimeSeries read_csv_file(const std::string& path);

// Dispatches on extension: .csv -> CSV, anything else -> TSK1.
TimeSeries read_series_file(const std::string& path);

} // namespace tstok
