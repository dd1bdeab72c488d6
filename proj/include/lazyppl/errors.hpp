#ifndef LAZYPPL_ERRORS_HPP_
#define LAZYPPL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lazyppl {

// Bad distribution or kernel parameter (negative sigma, rate <= 0, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Negative or NaN argument to score.
class InvalidScore : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Every weighted run had weight zero.
class DegenerateMeasure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-site proposal on a run that consumed no randomness.
class NoSites : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lazyppl

#endif  // LAZYPPL_ERRORS_HPP_
