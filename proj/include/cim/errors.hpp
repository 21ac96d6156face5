#pragma once

#include <stdexcept>
#include <string>

namespace cim {

/// Error with a stable machine-parsable category token. The CLI prints
/// `error: <category>: <message>` on one line and maps categories to exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

inline Error usage_error(const std::string& msg) { return Error("usage", msg); }
inline Error io_error(const std::string& msg) { return Error("io", msg); }
inline Error format_error(const std::string& msg) { return Error("format", msg); }
inline Error shape_error(const std::string& msg) { return Error("shape", msg); }
inline Error config_error(const std::string& msg) { return Error("config", msg); }
inline Error numeric_error(const std::string& msg) { return Error("numeric", msg); }
inline Error data_error(const std::string& msg) { return Error("data", msg); }

}  // namespace cim
