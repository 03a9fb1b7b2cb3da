#pragma once

#include <stdexcept>
#include <string>

namespace detlab {

/// Base class for every structural error raised by the library.
/// Inequality failures are never reported through exceptions.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (non-square input, length mismatch).
class dimension_error : public error {
public:
    using error::error;
};

/// Argument outside the mathematical domain of the operation.
class domain_error : public error {
public:
    using error::error;
};

/// Input was required to be positive semidefinite and is not.
class not_psd_error : public domain_error {
public:
    using domain_error::domain_error;
};

/// Inversion of a matrix that is singular to working tolerance.
class singularity_error : public domain_error {
public:
    using domain_error::domain_error;
};

/// Malformed matrix, config, or report document.
class parse_error : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

} // namespace detlab
