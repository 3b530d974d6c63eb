#pragma once

#include <stdexcept>
#include <string>

namespace tstok {

enum class errc {
    non_finite_input,
    shape_mismatch,
    spec_invalid,
    ragged_channels,
    unknown_token,
    missing_terminator,
    overflow,
    parse_error,
    insufficient_data,
    too_short,
    invalid_range,
    unknown_template,
    missing_metadata,
    transport_error,
    fixture_miss,
    uuid_mismatch,
    missing_response,
    all_replicates_unparseable,
    corrupt_matrix,
    bad_format,
    repeated_role,
    io_error,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

} // namespace tstok
