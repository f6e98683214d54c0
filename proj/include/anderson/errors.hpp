#pragma once

#include <stdexcept>
#include <string>

namespace anderson {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments: bad grid, violated ordering, out-of-range window.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inverse iteration failed to reach the residual target.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Riccati step too coarse to resolve explosions at the requested cap.
class StepTooCoarse : public Error {
public:
    using Error::Error;
};

/// Explosion counts were not monotone across a bisection bracket.
class BracketFailure : public Error {
public:
    using Error::Error;
};

/// The trajectory never reached the level required for an excursion profile.
class NoCrossing : public Error {
public:
    using Error::Error;
};

/// a_of_L called with L at or below m(0).
class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Not enough resolvable nodes left after excluding the zero neighbourhoods.
class InsufficientDomain : public Error {
public:
    using Error::Error;
};

/// Dirichlet/Neumann reports do not come from the same noise.
class PairingMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed binary cache or CSV input.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace anderson
