#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smm {

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal contract (e.g. an unresolvable distance tie).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace smm
