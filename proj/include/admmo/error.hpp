#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace admmo {

// Base class for every failure raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class space_too_large : public error {
public:
  using error::error;
};

// Raised when an uncached configuration is requested after the ledger is full.
class budget_exhausted : public error {
public:
  using error::error;
};

class unmeasured_configuration : public error {
public:
  using error::error;
};

class parse_error : public error {
public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace admmo
