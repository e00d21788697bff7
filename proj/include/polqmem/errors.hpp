#pragma once

#include <stdexcept>
#include <string>

namespace polqmem {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A precondition on user-supplied values was violated (negative depth,
// un-normalized state, out-of-range angle, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// A matrix factorization could not be carried out (singular input).
class DecompositionFailed : public Error {
public:
    using Error::Error;
};

// The requested combination of parameters is outside the model
// (e.g. backward recall through a birefringent medium).
class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

// A photon-number truncation leaves more than the allowed tail mass.
class CutoffTooSmall : public Error {
public:
    using Error::Error;
};

// A measured value cannot be produced by the source model at any
// parameter setting, so inversion is impossible.
class OutOfModel : public Error {
public:
    using Error::Error;
};

// Count data carry no usable information (e.g. an all-zero record).
class DegenerateData : public Error {
public:
    using Error::Error;
};

}  // namespace polqmem
