#pragma once

#include <stdexcept>
#include <string>

namespace czono {

// Root of the library's exception family. Everything thrown on purpose
// derives from this, so callers can catch czono::Error at module borders.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class LengthMismatch : public Error {
public:
  explicit LengthMismatch(const std::string& what) : Error(what) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

class DivisionByZeroInterval : public DomainError {
public:
  explicit DivisionByZeroInterval(const std::string& what) : DomainError(what) {}
};

// Parse failure; offset is the byte position in the input text.
class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " (byte " + std::to_string(offset) + ")"), offset(offset) {}
  std::size_t offset;
};

class UnknownVariable : public Error {
public:
  explicit UnknownVariable(const std::string& what) : Error(what) {}
};

class NonSmooth : public Error {
public:
  explicit NonSmooth(const std::string& what) : Error(what) {}
};

class EmptySet : public Error {
public:
  explicit EmptySet(const std::string& what) : Error(what) {}
};

class EmptyPolytope : public Error {
public:
  explicit EmptyPolytope(const std::string& what) : Error(what) {}
};

class UnboundedPolytope : public Error {
public:
  explicit UnboundedPolytope(const std::string& what) : Error(what) {}
};

class TargetTooSmall : public Error {
public:
  explicit TargetTooSmall(const std::string& what) : Error(what) {}
};

class NoEliminablePivot : public Error {
public:
  explicit NoEliminablePivot(const std::string& what) : Error(what) {}
};

class NotInRange : public Error {
public:
  explicit NotInRange(const std::string& what) : Error(what) {}
};

class NumericalFailure : public Error {
public:
  explicit NumericalFailure(const std::string& what) : Error(what) {}
};

class DegenerateInput : public Error {
public:
  explicit DegenerateInput(const std::string& what) : Error(what) {}
};

class DimensionUnsupported : public Error {
public:
  explicit DimensionUnsupported(const std::string& what) : Error(what) {}
};

class NotAffineInW : public Error {
public:
  explicit NotAffineInW(const std::string& what) : Error(what) {}
};

class SchemaMismatch : public Error {
public:
  explicit SchemaMismatch(const std::string& what) : Error(what) {}
};

}  // namespace czono
