// errors.hpp - Exception hierarchy shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace polaron {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: violated preconditions, malformed densities, bad configs.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A weighted moment (or the propagator built from them) does not exist.
// The density lies outside the domain where the polaron treatment is finite.
class DivergentMoment : public Error {
public:
    using Error::Error;
};

// Moment matching produced a non-real, non-positive node or weight.
class NonPhysicalSolution : public Error {
public:
    using Error::Error;
};

// Moment matching could not reach the residual target.
class IllConditioned : public Error {
public:
    using Error::Error;
};

// Amplitude series needs more terms than the configured hard cap.
class TruncationFailure : public Error {
public:
    using Error::Error;
};

// Steady state requested with gamma_up + gamma_down == 0.
class DegenerateRates : public Error {
public:
    using Error::Error;
};

// exp(phi(t) - phi(0)) never settles (discrete spectra): no smooth kernel.
class NonDecayingPropagator : public Error {
public:
    using Error::Error;
};

}  // namespace polaron
