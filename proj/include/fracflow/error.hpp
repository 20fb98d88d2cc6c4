#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace fracflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FRACFLOW_ERROR(name)                         \
    class name : public Error {                      \
    public:                                          \
        using Error::Error;                          \
    };

FRACFLOW_ERROR(DimensionError)
FRACFLOW_ERROR(DomainError)
FRACFLOW_ERROR(InstabilityError)
FRACFLOW_ERROR(OrderError)
FRACFLOW_ERROR(QuadratureError)
FRACFLOW_ERROR(CoverageError)
FRACFLOW_ERROR(ConfigError)
FRACFLOW_ERROR(TruncationError)
FRACFLOW_ERROR(DegenerateLawError)
FRACFLOW_ERROR(UnsupportedDirectionError)

#undef FRACFLOW_ERROR

// Non-fatal diagnostics (box too small, basis not orthonormal, ...).
using WarningHandler = std::function<void(const std::string&)>;

// Returns the previous handler. Passing an empty function restores the default (stderr).
WarningHandler set_warning_handler(WarningHandler h);
void warn(const std::string& msg);

}  // namespace fracflow
