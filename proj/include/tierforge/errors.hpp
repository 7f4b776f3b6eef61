#pragma once

#include <stdexcept>
#include <string>

namespace tierforge {

enum class Errc {
    file_not_found,
    unsupported_image,
    io_failure,
    bad_argument,
    dimension_mismatch,
    invalid_metadata,
    schema_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace tierforge
