#pragma once

#include <stdexcept>
#include <string>

namespace constikit {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (wrong layout, wrong sizes, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Deformation gradient or configuration with det <= 0.
class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

// Raised by a constitutive update. The FE driver reacts by cutting the increment.
class MaterialError : public Error {
 public:
  using Error::Error;
};

// Shared-library plugin could not be opened or lacks the entry symbol.
class PluginError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"
                       : what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace constikit
