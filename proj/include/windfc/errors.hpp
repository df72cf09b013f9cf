#pragma once

#include <stdexcept>
#include <string>

namespace windfc {

// Error taxonomy mirrored by the C API status codes and CLI exit codes:
// usage -> 1, data -> 2, numeric -> 3.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace windfc
