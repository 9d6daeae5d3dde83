#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace prszz {

// Root of the error taxonomy. `code()` is the stable machine-readable name
// surfaced in the CLI's error JSON; `what()` carries the human detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define PRSZZ_ERROR_TYPE(Name)                            \
    class Name : public Error {                           \
    public:                                               \
        explicit Name(const std::string& detail)          \
            : Error(#Name, detail) {}                     \
    }

// vcs-core
PRSZZ_ERROR_TYPE(NotARepository);
PRSZZ_ERROR_TYPE(CorruptObjectDatabase);
PRSZZ_ERROR_TYPE(UnknownCommit);
PRSZZ_ERROR_TYPE(PathNotPresent);
PRSZZ_ERROR_TYPE(LineOutOfRange);

// forge-snapshot
PRSZZ_ERROR_TYPE(AuthFailure);
PRSZZ_ERROR_TYPE(RateLimitExhausted);
PRSZZ_ERROR_TYPE(NetworkError);
PRSZZ_ERROR_TYPE(SchemaViolation);
PRSZZ_ERROR_TYPE(IoError);

// pr-reconstruct
PRSZZ_ERROR_TYPE(NotMerged);
PRSZZ_ERROR_TYPE(StrategyUnknown);

// change-filter
PRSZZ_ERROR_TYPE(NoAncestorOutsidePr);

// dataset-eval
PRSZZ_ERROR_TYPE(MissingTruth);

// cli / fixture
PRSZZ_ERROR_TYPE(ConfigError);
PRSZZ_ERROR_TYPE(FixtureError);

#undef PRSZZ_ERROR_TYPE

} // namespace prszz
