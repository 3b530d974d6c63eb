#include "tstok/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "tstok/errors.hpp"

namespace tstok {

namespace {

std::uint32_t crc32(const unsigned char* data, std::size_t len, std::uint32_t crc = 0xffffffffu) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[n] = c;
        }
        return t;
    }();
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return crc;
}

void put_u32_be(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v >> 24));
    out.push_back(static_cast<char>(v >> 16));
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v));
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    std::string body(type, 4);
    body += payload;
    out += body;
    std::uint32_t crc = crc32(reinterpret_cast<const unsigned char*>(body.data()), body.size()) ^ 0xffffffffu;
    put_u32_be(out, crc);
}

// zlib stream with stored (uncompressed) deflate blocks; enough for chart
// images and keeps the encoder dependency free.
std::string zlib_store(const std::string& raw) {
    std::string out;
    out.push_back(0x78);
    out.push_back(0x01);
    std::size_t pos = 0;
    do {
        std::size_t n = std::min<std::size_t>(raw.size() - pos, 65535);
        bool final = pos + n == raw.size();
        out.push_back(final ? 1 : 0);
        out.push_back(static_cast<char>(n & 0xff));
        out.push_back(static_cast<char>(n >> 8));
        out.push_back(static_cast<char>(~n & 0xff));
        out.push_back(static_cast<char>((~n >> 8) & 0xff));
        out.append(raw, pos, n);
        pos += n;
    } while (pos < raw.size());
    std::uint32_t a = 1, b = 0;
    for (unsigned char c : raw) {
        a = (a + c) % 65521;
        b = (b + a) % 65521;
    }
    put_u32_be(out, (b << 16) | a);
    return out;
}

struct Canvas {
    unsigned width;
    unsigned height;
    std::vector<unsigned char> pixels; // RGB

    Canvas(unsigned w, unsigned h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0xff) {}

    void set(long x, long y, unsigned char r, unsigned char g, unsigned char b) {
        if (x < 0 || y < 0 || x >= static_cast<long>(width) || y >= static_cast<long>(height)) return;
        std::size_t i = (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)) * 3;
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }

    void line(long x0, long y0, long x1, long y1, unsigned char r, unsigned char g, unsigned char b) {
        long dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        long dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        long err = dx + dy;
        for (;;) {
            set(x0, y0, r, g, b);
            if (x0 == x1 && y0 == y1) break;
            long e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }
};

constexpr unsigned char kPalette[8][3] = {{31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
                                          {148, 103, 189}, {140, 86, 75},  {227, 119, 194}, {127, 127, 127}};

} // namespace

std::string render_line_chart(const TimeSeries& series, unsigned width, unsigned height) {
    if (width < 16 || height < 16) fail(errc::spec_invalid, "chart must be at least 16x16");
    Canvas canvas(width, height);

    double lo = series.values()[0];
    double hi = lo;
    for (double v : series.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const long margin = 8;
    const double plot_w = static_cast<double>(width) - 2.0 * margin;
    const double plot_h = static_cast<double>(height) - 2.0 * margin;
    const std::size_t L = series.length();
    for (std::size_t c = 0; c < series.channels(); ++c) {
        const auto* color = kPalette[c % 8];
        auto ch = series.channel(c);
        long px = 0, py = 0;
        for (std::size_t t = 0; t < L; ++t) {
            double fx = L > 1 ? static_cast<double>(t) / static_cast<double>(L - 1) : 0.5;
            double fy = (ch[t] - lo) / (hi - lo);
            long x = margin + static_cast<long>(std::lround(fx * plot_w));
            long y = margin + static_cast<long>(std::lround((1.0 - fy) * plot_h));
            if (t > 0) canvas.line(px, py, x, y, color[0], color[1], color[2]);
            px = x;
            py = y;
        }
        if (L == 1) canvas.set(px, py, color[0], color[1], color[2]);
    }

    // filter byte 0 per scanline, then the zlib wrapper
    std::string raw;
    raw.reserve(static_cast<std::size_t>(height) * (static_cast<std::size_t>(width) * 3 + 1));
    for (unsigned y = 0; y < height; ++y) {
        raw.push_back(0);
        raw.append(reinterpret_cast<const char*>(&canvas.pixels[static_cast<std::size_t>(y) * width * 3]),
                   static_cast<std::size_t>(width) * 3);
    }

    std::string png("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32_be(ihdr, width);
    put_u32_be(ihdr, height);
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // filter method
    ihdr.push_back(0);  // no interlace
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", zlib_store(raw));
    append_chunk(png, "IEND", "");
    return png;
}

void write_line_chart(const std::string& path, const TimeSeries& series, unsigned width, unsigned height) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    std::string png = render_line_chart(series, width, height);
    out.write(png.data(), static_cast<std::streamsize>(png.size()));
}

} // namespace tstok
