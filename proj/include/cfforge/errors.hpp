#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfforge {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// exprlang

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : SyntaxError("unknown identifier '" + name + "'", offset), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public Error {
 public:
  explicit DivisionByZero(const std::string& subterm)
      : Error("division by zero in '" + subterm + "'"), subterm_(subterm) {}
  const std::string& subterm() const noexcept { return subterm_; }

 private:
  std::string subterm_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// cfengine

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class PoleAtIndex : public Error {
 public:
  explicit PoleAtIndex(long index, const std::string& detail = {})
      : Error("pole at index " + std::to_string(index) + (detail.empty() ? "" : ": " + detail)),
        index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

class OverflowBudget : public Error {
 public:
  using Error::Error;
};

class DivergentSeries : public Error {
 public:
  using Error::Error;
};

class SlowConvergence : public Error {
 public:
  using Error::Error;
};

class IrregularTerms : public Error {
 public:
  using Error::Error;
};

// telescope

class NonConvergent : public Error {
 public:
  using Error::Error;
};

class UnsupportedShift : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class DegreeTooHigh : public Error {
 public:
  using Error::Error;
};

// solver

class Degenerate : public Error {
 public:
  using Error::Error;
};

// recognizer

class PrecisionTooLow : public Error {
 public:
  using Error::Error;
};

}  // namespace cfforge
