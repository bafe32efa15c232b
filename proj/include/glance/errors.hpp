#pragma once

#include <stdexcept>
#include <string>

namespace glance {

// Bad argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Argument outside the supported evaluation range.
struct range_error : std::range_error {
  using std::range_error::range_error;
};

// Unusable grid, tolerance or option combination.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The spectral family hits a zero of its normalizing factor.
struct pole_error : std::runtime_error {
  double where;
  pole_error(const std::string& msg, double w) : std::runtime_error(msg), where(w) {}
};

// Step-size underflow or iteration cap in an adaptive/iterative scheme.
struct integration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A checked property failed (trapped ray, non-decaying input, ...).
struct property_violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace glance
