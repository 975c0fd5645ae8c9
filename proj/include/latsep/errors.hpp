#pragma once

#include <stdexcept>
#include <string>

namespace latsep {

// Base for all library errors. CLI maps subtypes onto exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input / configuration problems (CLI exit 2)
struct ConfigError : Error { using Error::Error; };
struct UnknownAttribute : ConfigError { using ConfigError::ConfigError; };
struct ParseError : ConfigError { using ConfigError::ConfigError; };
struct SchemaError : ConfigError { using ConfigError::ConfigError; };
struct ValidationError : ConfigError { using ConfigError::ConfigError; };
struct VersionError : ConfigError { using ConfigError::ConfigError; };
struct RangeError : ConfigError { using ConfigError::ConfigError; };
struct DimensionMismatch : ConfigError { using ConfigError::ConfigError; };

// Data sufficiency problems (CLI exit 3)
struct DataError : Error { using Error::Error; };
struct EmptySubgroup : DataError { using DataError::DataError; };
struct InsufficientSamples : DataError { using DataError::DataError; };
struct InsufficientPoints : DataError { using DataError::DataError; };
struct DegenerateData : DataError { using DataError::DataError; };
struct DegenerateConditional : DataError { using DataError::DataError; };
struct DegenerateVariance : DataError { using DataError::DataError; };
struct MissingEndpoint : DataError { using DataError::DataError; };

// Artifact mismatches (CLI exit 4)
struct MismatchError : Error { using Error::Error; };
struct MismatchedRuns : MismatchError { using MismatchError::MismatchError; };
struct MismatchedAttributes : MismatchError { using MismatchError::MismatchError; };
struct SizeMismatch : MismatchError { using MismatchError::MismatchError; };

// Everything else (CLI exit 1)
struct IoError : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };

}  // namespace latsep
