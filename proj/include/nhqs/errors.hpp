// Exception types shared across the library.
#ifndef NHQS_ERRORS_HPP
#define NHQS_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhqs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

// Raised while integrating a strongly growing evanescent solution.
class NonFiniteState : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " (byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_ = 0;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : Error("unknown identifier '" + name + "' (byte " + std::to_string(offset) + ")"),
          name_(name),
          offset_(offset) {}
    const std::string& name() const { return name_; }
    std::size_t offset() const { return offset_; }

private:
    std::string name_;
    std::size_t offset_ = 0;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NonAnalyticAtComplexPoint : public Error {
public:
    using Error::Error;
};

// A diagonal block of a reduced transfer matrix turned out singular.  This is
// physics (a spectral singularity), not a programming error; callers are
// expected to catch it and flag the record.
class SpectralSingularity : public Error {
public:
    SpectralSingularity(const std::string& block, const std::string& what)
        : Error(what), block_(block) {}
    const std::string& block() const { return block_; }

private:
    std::string block_;
};

class LinearSolveFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nhqs

#endif  // NHQS_ERRORS_HPP
