#pragma once

#include <stdexcept>
#include <string>

namespace kmf {

// Thrown when a documented precondition of an operation is violated by the
// caller (as opposed to malformed scalar parameters, which use
// std::invalid_argument, and I/O failures, which use std::runtime_error).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace kmf
