#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace t2m {

/// Base of every error raised by the library. `kind()` is the stable,
/// machine-readable error name used by the CLI and JSON reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
};

class SyntaxError : public Error {
 public:
  SyntaxError(SourceSpan span, const std::string& message)
      : Error("SyntaxError", std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message),
        span_(span) {}

  SourceSpan span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

enum class ValidationKind { NoStart, MultipleStart, StartHasIncoming, BadOutDegree, DanglingSuccessor, DuplicateVertex };

const char* to_string(ValidationKind kind);

class ValidationError : public Error {
 public:
  ValidationError(ValidationKind kind, std::string vertex, const std::string& message)
      : Error("ValidationError", std::string(to_string(kind)) + " at '" + vertex + "': " + message),
        validation_kind_(kind),
        vertex_(std::move(vertex)) {}

  ValidationKind validation_kind() const noexcept { return validation_kind_; }
  const std::string& vertex() const noexcept { return vertex_; }

 private:
  ValidationKind validation_kind_;
  std::string vertex_;
};

// The remaining errors only need a kind and a message.
#define T2M_SIMPLE_ERROR(Name)                                               \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& message) : Error(#Name, message) {}     \
  }

T2M_SIMPLE_ERROR(ParseError);
T2M_SIMPLE_ERROR(TailNotZero);
T2M_SIMPLE_ERROR(TailMismatch);
T2M_SIMPLE_ERROR(DecodeError);
T2M_SIMPLE_ERROR(PrefixUnavailable);
T2M_SIMPLE_ERROR(NonBinaryInput);
T2M_SIMPLE_ERROR(OracleDomainError);
T2M_SIMPLE_ERROR(OracleDivergence);
T2M_SIMPLE_ERROR(IndexOutOfRange);
T2M_SIMPLE_ERROR(MultipleCalls);
T2M_SIMPLE_ERROR(WitnessDiverged);
T2M_SIMPLE_ERROR(BudgetExceeded);
T2M_SIMPLE_ERROR(CallBudgetExceeded);
T2M_SIMPLE_ERROR(QueryUndecidedWithinFuel);
T2M_SIMPLE_ERROR(CertificateUnverifiable);
T2M_SIMPLE_ERROR(CertificateRefuted);
T2M_SIMPLE_ERROR(UnknownName);

#undef T2M_SIMPLE_ERROR

}  // namespace t2m
