#ifndef EMDFLOW_ERRORS_HPP
#define EMDFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emdflow {

// Malformed input text (bad token, wrong arity, missing header).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid data (non-finite coordinates, bad dimension, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Supplies do not sum to zero after duplicate merging.
struct SupplyImbalanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The iterative solver could not certify a flow (value grid exhausted).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exact-oracle size guard was exceeded.
struct SizeGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace emdflow

#endif
