#pragma once

#include <stdexcept>
#include <string>

namespace chs {

// Base class for all library errors. Subclasses name the violated predicate.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonTraceFree : Error {
    using Error::Error;
};
struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct PoleHit : Error {
    using Error::Error;
};
struct NotSL2 : Error {
    using Error::Error;
};
struct EtaUnreachable : Error {
    explicit EtaUnreachable(double n)
        : Error("eta(" + std::to_string(n) + ") unreachable: sqrt(det H) is integrable"), level(n) {}
    double level;
};
struct DegenerateCell : Error {
    using Error::Error;
};
struct NotUnitDeterminant : Error {
    using Error::Error;
};
struct SingularWindow : Error {
    using Error::Error;
};
struct DerivativeUnstable : Error {
    using Error::Error;
};
struct QuadratureNotConverged : Error {
    QuadratureNotConverged(double last, double previous)
        : Error("quadrature did not converge: last=" + std::to_string(last) +
                " previous=" + std::to_string(previous)),
          last_estimate(last), previous_estimate(previous) {}
    double last_estimate;
    double previous_estimate;
};
struct StepUnderflow : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct InvalidHamiltonian : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

}  // namespace chs
