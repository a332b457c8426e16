#pragma once

#include <stdexcept>
#include <string>

namespace batchlearn {

// Argument outside the mathematical domain of an operation (x outside [0,1],
// beta <= -1, negative overlap, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The requested quantity is infinite or undefined: a zeta function outside
// its convergence half-line, an overlap equal to 1, alpha <= 1 where a mean
// is requested.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not certify the requested accuracy.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Too many simulated trials hit the horizon without settling.
class CensoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The distribution has no power-law density at 1 (support bounded away from 1).
class NoPowerTailError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input exceeds a hard size limit (e.g. 2^n subset enumeration).
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Invalid run configuration or distribution spec string.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace batchlearn

namespace batchlearn {

// File could not be read or written; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace batchlearn
