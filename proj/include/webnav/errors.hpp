#pragma once

#include <stdexcept>
#include <string>

namespace webnav {

// Base of every error the library throws. `code()` is a stable short name
// used in diagnostics and by the CLI to pick an exit status.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)), detail_(detail) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string code_;
    std::string detail_;
};

#define WEBNAV_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& detail) : Error(#Name, detail) {}     \
    }

WEBNAV_DEFINE_ERROR(EmptyDocument);
WEBNAV_DEFINE_ERROR(UnknownNode);
WEBNAV_DEFINE_ERROR(InvalidConfig);
WEBNAV_DEFINE_ERROR(NonPositiveViewport);
WEBNAV_DEFINE_ERROR(NonFiniteInput);
WEBNAV_DEFINE_ERROR(MissingField);
WEBNAV_DEFINE_ERROR(MissingSite);
WEBNAV_DEFINE_ERROR(ExhaustedTrace);
WEBNAV_DEFINE_ERROR(PolicyError);
WEBNAV_DEFINE_ERROR(EnvironmentError);
WEBNAV_DEFINE_ERROR(SchemaError);

#undef WEBNAV_DEFINE_ERROR

}  // namespace webnav
