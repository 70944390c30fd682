#pragma once

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace earlyrisk {

// Base error for everything raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration, bad CLI arguments, violated preconditions.
struct ConfigError : Error {
    using Error::Error;
};

// Malformed input files or corpora.
struct DataError : Error {
    using Error::Error;
};

// Wire-protocol violations between client and server.
struct ProtocolError : Error {
    using Error::Error;
};

inline std::string strfmt(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list copy;
    va_copy(copy, args);
    int n = std::vsnprintf(nullptr, 0, fmt, copy);
    va_end(copy);
    std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
    if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, args);
    va_end(args);
    return out;
}

// Whitespace tokenization; the single token definition used across the project.
std::vector<std::string> tokenize(std::string_view text);
size_t count_tokens(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);

// Median with the even-length convention: arithmetic mean of the central pair.
double median(std::vector<double> values);

}  // namespace earlyrisk
