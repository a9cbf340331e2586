#pragma once

#include <stdexcept>
#include <string>

namespace geqie {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of the operation (λ ∉ [0,1], zero shots, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A qubit or coordinate index is out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// An encoding model violates its own contract (non-injective position map, bad value state size, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// The requested register does not fit under the configured qubit cap.
class CapacityError : public Error {
public:
    CapacityError(unsigned required, unsigned allowed, const std::string &what)
        : Error(what + ": requires " + std::to_string(required) + " qubits, cap is " + std::to_string(allowed)),
          required_(required),
          allowed_(allowed) {
    }

    unsigned required() const noexcept {
        return required_;
    }
    unsigned allowed() const noexcept {
        return allowed_;
    }

private:
    unsigned required_;
    unsigned allowed_;
};

}  // namespace geqie
