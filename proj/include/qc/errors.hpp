#pragma once

#include <stdexcept>
#include <string>

namespace qc {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Eigenvalues of the linearized system are real: no damped rotation exists.
struct NotOscillatory : Error {
    explicit NotOscillatory(const std::string& msg) : Error(msg) {}
};

// The canonical transform is (numerically) singular.
struct SingularTransform : Error {
    explicit SingularTransform(const std::string& msg) : Error(msg) {}
};

// Requested value lies outside the admissible parameter range.
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

// A state update produced NaN/Inf or left the trusted magnitude range.
struct NumericalDivergence : Error {
    explicit NumericalDivergence(const std::string& msg) : Error(msg) {}
};

// Initial condition violates a process precondition (e.g. amplitude <= 0).
struct InvalidInitial : Error {
    explicit InvalidInitial(const std::string& msg) : Error(msg) {}
};

// A path was sampled on a different grid than the caller expects.
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

// An operation that needs at least one element received none.
struct EmptyInput : Error {
    explicit EmptyInput(const std::string& msg) : Error(msg) {}
};

// A series is too short for the requested estimate.
struct InsufficientData : Error {
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

} // namespace qc
