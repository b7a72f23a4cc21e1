#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phasekit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidHamiltonian : public Error {
public:
    using Error::Error;
};

/// A positive-P mapping needs derivatives above second order in the P Liouville sum.
class HigherOrderDerivatives : public Error {
public:
    using Error::Error;
};

class DivergedTrajectory : public Error {
public:
    using Error::Error;
};

class DivergenceThresholdExceeded : public Error {
public:
    DivergenceThresholdExceeded(std::size_t diverged, std::size_t paths, double threshold)
        : Error("diverged trajectories " + std::to_string(diverged) + " of " + std::to_string(paths) +
                " exceed threshold fraction " + std::to_string(threshold)),
          diverged_(diverged),
          paths_(paths) {}

    std::size_t diverged() const noexcept { return diverged_; }
    std::size_t paths() const noexcept { return paths_; }

private:
    std::size_t diverged_;
    std::size_t paths_;
};

class OrderingViolation : public Error {
public:
    using Error::Error;
};

class InsufficientBatches : public Error {
public:
    using Error::Error;
};

class WindowOverflow : public Error {
public:
    using Error::Error;
};

class CutoffInsufficient : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    enum class Kind { missing_key, invalid_value, unknown_key };

    ConfigError(Kind kind, std::string key, const std::string& detail)
        : Error(describe(kind) + " '" + key + "'" + (detail.empty() ? "" : ": " + detail)),
          kind_(kind),
          key_(std::move(key)) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string describe(Kind kind) {
        switch (kind) {
            case Kind::missing_key: return "missing key";
            case Kind::invalid_value: return "invalid value for key";
            case Kind::unknown_key: return "unknown key";
        }
        return "config error";
    }

    Kind kind_;
    std::string key_;
};

}  // namespace phasekit
