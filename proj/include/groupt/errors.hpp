#pragma once

#include <stdexcept>
#include <string>

namespace groupt {

/// Bad input: malformed literal, probability outside (0,1), misoriented pair.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive engine was asked for a population larger than it supports.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A policy tree that is not a valid nested strategy for the population.
class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_size_at_most(std::size_t n, std::size_t limit, const char* what) {
  if (n > limit) {
    throw SizeLimitError(std::string(what) + ": n = " + std::to_string(n) +
                         " exceeds limit " + std::to_string(limit));
  }
}

}  // namespace groupt
