#include "tstok/rng.hpp"

#include <array>
#include <cctype>

namespace tstok {

std::string uuid_v4(Rng& rng) {
    std::array<unsigned char, 16> b{};
    for (int i = 0; i < 16; i += 8) {
        std::uint64_t w = rng.next_u64();
        for (int k = 0; k < 8; ++k) b[static_cast<std::size_t>(i + k)] = static_cast<unsigned char>(w >> (8 * k));
    }
    b[6] = static_cast<unsigned char>((b[6] & 0x0f) | 0x40); // version 4
    b[8] = static_cast<unsigned char>((b[8] & 0x3f) | 0x80); // variant 10xx
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
        out.push_back(hex[b[static_cast<std::size_t>(i)] >> 4]);
        out.push_back(hex[b[static_cast<std::size_t>(i)] & 0x0f]);
    }
    return out;
}

bool is_valid_uuid(std::string_view s) {
    if (s.size() != 36) return false;
    for (std::size_t i = 0; i < 36; ++i) {
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (s[i] != '-') return false;
        } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    char version = s[14];
    if (version < '1' || version > '5') return false;
    char variant = static_cast<char>(std::tolower(static_cast<unsigned char>(s[19])));
    return variant == '8' || variant == '9' || variant == 'a' || variant == 'b';
}

} // namespace tstok
