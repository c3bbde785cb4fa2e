#pragma once

#include <stdexcept>
#include <string>

namespace dstft {

/// A parameter lies outside its domain (window length, layout invariant, shape).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The optimizer produced a non-finite gradient or objective.
class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dstft
