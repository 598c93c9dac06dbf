#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orbitlab {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch, point outside its domain, or a pole of a chart map.
class DomainError : public Error {
public:
  using Error::Error;
};

enum class ParseErrorKind {
  syntax,
  unknown_identifier,
  arity_mismatch,
  non_integer_exponent,
  invalid_domain,
};

class ParseError : public Error {
public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  /// Byte offset into the parsed text.
  std::size_t offset() const noexcept { return offset_; }

private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

enum class EvalErrorKind { branch_cut, division_by_zero, non_finite };

class EvalError : public Error {
public:
  EvalError(EvalErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  EvalErrorKind kind() const noexcept { return kind_; }

private:
  EvalErrorKind kind_;
};

enum class InversionErrorKind {
  newton_diverged,
  left_domain,
  singular_jacobian,
  evaluation,
  inverse_mismatch,
};

class InversionError : public Error {
public:
  InversionError(InversionErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  InversionErrorKind kind() const noexcept { return kind_; }

private:
  InversionErrorKind kind_;
};

class CatalogError : public Error {
public:
  using Error::Error;
};

const char* to_string(InversionErrorKind kind) noexcept;

}  // namespace orbitlab
