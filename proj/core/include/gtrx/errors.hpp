#pragma once

#include <stdexcept>
#include <string>

namespace gtrx {

/// Base for every error the library raises. `kind()` is a stable,
/// machine-readable tag used by the CLI's error report.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define GTRX_DECLARE_ERROR(Name)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

GTRX_DECLARE_ERROR(MalformedDocument);
GTRX_DECLARE_ERROR(EmptyIndex);
GTRX_DECLARE_ERROR(ScorerUnavailable);
GTRX_DECLARE_ERROR(DomainError);
GTRX_DECLARE_ERROR(MalformedResponse);
GTRX_DECLARE_ERROR(CompletionFailure);
GTRX_DECLARE_ERROR(TransportError);
GTRX_DECLARE_ERROR(MissingPrediction);
GTRX_DECLARE_ERROR(InvalidInput);
GTRX_DECLARE_ERROR(AmbiguousMatch);
GTRX_DECLARE_ERROR(UnresolvedMeeting);
GTRX_DECLARE_ERROR(SchemaViolation);
GTRX_DECLARE_ERROR(IoFailure);
GTRX_DECLARE_ERROR(ConfigError);

#undef GTRX_DECLARE_ERROR

}  // namespace gtrx
