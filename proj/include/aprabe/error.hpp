#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace aprabe {

// Root of every error thrown by the library. The CLI maps the subclasses
// onto its documented exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input (policy, attribute list, matrix JSON).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::optional<std::size_t> position = std::nullopt)
        : Error(position ? what + " at position " + std::to_string(*position) : what), position_(position) {}

    std::optional<std::size_t> position() const noexcept { return position_; }

private:
    std::optional<std::size_t> position_;
};

// Well-formed input that violates a semantic contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Binary artifact is not a valid encoding (bad magic, truncation, ...).
class FormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class TruncatedError : public FormatError {
public:
    using FormatError::FormatError;
};

// Elements or artifacts built over different group parameters were mixed.
class ParamsMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Artifacts bound to different attribute matrices were combined.
class FingerprintMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DelegationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// The attribute set does not satisfy the key's access structure.
class NotAuthorized : public Error {
public:
    using Error::Error;
};

class DepthMismatch : public NotAuthorized {
public:
    using NotAuthorized::NotAuthorized;
};

// Checksum or AEAD tag did not verify.
class IntegrityError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParamGenError : public Error {
public:
    using Error::Error;
};

}  // namespace aprabe
