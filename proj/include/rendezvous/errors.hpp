#pragma once

#include <stdexcept>
#include <string>

namespace rendezvous {

// Inputs outside the mathematical domain of an operation (arcsin arguments,
// zero airspeed, singular dynamics configurations).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested trim condition cannot be sustained with admissible inputs.
struct InfeasibleTrim : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside the optimizer (Riccati blow-up, no descent
// direction after maximal regularization).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration text.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally valid configuration violating an invariant; the message names
// the offending key.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Query outside a path's arc-length range.
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rendezvous
