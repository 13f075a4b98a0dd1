#pragma once

#include <stdexcept>
#include <string>

namespace qfalab {

/// Base class for all qfalab errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidModulusError : Error {
    using Error::Error;
};
struct InvalidSpecError : Error {
    using Error::Error;
};
struct InvalidParameterError : Error {
    using Error::Error;
};
struct BudgetExceededError : Error {
    using Error::Error;
};
struct ResolutionError : Error {
    using Error::Error;
};
struct AmplitudeExceedsInputError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct GridError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct RangeError : Error {
    using Error::Error;
};
struct NormalizationError : Error {
    using Error::Error;
};
struct InversionError : Error {
    using Error::Error;
};
struct FitError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace qfalab
