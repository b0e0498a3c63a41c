#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace liepnm {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Expression text could not be parsed.
class ParseError : public Error {
public:
    enum class Kind { Syntax, UnknownIdentifier };

    ParseError(Kind kind, std::size_t offset, std::vector<std::string> expected, const std::string& what)
        : Error(what), kind_(kind), offset_(offset), expected_(std::move(expected)) {}

    Kind kind() const noexcept { return kind_; }
    /// Byte offset into the source text.
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    Kind kind_;
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Numeric domain violation (log of a non-positive value, division by zero, overflow, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Reduced right-hand side cannot be evaluated at a point.
class ReductionError : public Error {
public:
    enum class Kind { Singular, NoRealSolution, BlowUp };

    ReductionError(Kind kind, double r, const std::string& what) : Error(what), kind_(kind), r_(r) {}

    Kind kind() const noexcept { return kind_; }
    double r() const noexcept { return r_; }

private:
    Kind kind_;
    double r_;
};

/// Failure while evaluating a batch of design points; `index` names the offending entry.
class DesignPointError : public Error {
public:
    DesignPointError(std::size_t index, const std::string& what) : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Linear data or covariance with the wrong rank / conditioning.
class RankError : public Error {
public:
    using Error::Error;
};

/// Polytope with empty interior.
class InfeasibleError : public Error {
public:
    InfeasibleError(std::size_t constraint, double slack, const std::string& what)
        : Error(what), constraint_(constraint), slack_(slack) {}

    /// Index of the tightest constraint at the best point found.
    std::size_t constraint() const noexcept { return constraint_; }
    double slack() const noexcept { return slack_; }

private:
    std::size_t constraint_;
    double slack_;
};

/// The sampler got trapped in a corner.
class SamplerError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Error annotated with the pipeline stage in which it occurred.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace liepnm
