#pragma once

#include <stdexcept>

namespace sequencer {

// Error classes map one-to-one onto CLI exit codes (see tools/).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed, missing, or non-finite input data.
struct InputError : Error {
  using Error::Error;
};

// Invalid options or parameter combinations.
struct ConfigError : Error {
  using Error::Error;
};

// Data that admits no meaningful sequence (all-equal objects, zero-sum
// segments, disconnected distance graphs).
struct DegenerateError : Error {
  using Error::Error;
};

}  // namespace sequencer
