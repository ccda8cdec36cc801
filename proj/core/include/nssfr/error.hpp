#pragma once

#include <stdexcept>
#include <string>

namespace nssfr {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed mask/config JSON, inconsistent sizes, bad flags.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A run that found nothing to measure (no frames matched the input pattern).
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Per-measurement failure inside the SFR computation. The reason is
/// recorded against the candidate rather than aborting the run.
class MeasurementError : public Error {
public:
    enum class Kind { EdgeIncoherent, PhaseCoverage, NoEdgeEnergy };

    MeasurementError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

} // namespace nssfr
