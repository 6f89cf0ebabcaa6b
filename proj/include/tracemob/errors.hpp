#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracemob {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: spec files, words, valuation files. Carries the
// 1-based line number when the problem is tied to a file line (0 otherwise).
class InputError : public Error {
 public:
  explicit InputError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A trace function was evaluated outside its declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// A probabilistic operation was requested for a valuation that is not Bernoulli.
class NotBernoulli : public Error {
 public:
  using Error::Error;
};

// A numerical precondition could not be established (e.g. no root found).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracemob
