#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace kaczmarz {

/// Malformed arguments: empty dimensions, mismatched sizes, non-finite data.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A zero row where a hyperplane projection needs a normal direction.
class ZeroRowError : public InvalidInputError {
 public:
  explicit ZeroRowError(std::optional<std::size_t> index = std::nullopt)
      : InvalidInputError(index ? "zero row at index " + std::to_string(*index)
                                : std::string("zero row")),
        index_(index) {}

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class ZeroColumnError : public InvalidInputError {
 public:
  explicit ZeroColumnError(std::optional<std::size_t> index = std::nullopt)
      : InvalidInputError(index ? "zero column at index " + std::to_string(*index)
                                : std::string("zero column")),
        index_(index) {}

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

/// A caller broke an operation's precondition (missing residual, misaligned
/// windows, bound applied to the wrong kind of trace).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace kaczmarz
