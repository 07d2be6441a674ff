#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace madbm {

/// Dimensions of a state, statistic or dataset disagree with the model shape.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exhaustive enumeration was requested beyond the configured guard.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed input file. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace madbm
