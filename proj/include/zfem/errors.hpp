#pragma once

#include <stdexcept>
#include <string>

namespace zfem {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidPolygon : public Error {
public:
  using Error::Error;
};

class NotStarShaped : public Error {
public:
  using Error::Error;
};

class DegenerateTriangle : public Error {
public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
public:
  using Error::Error;
};

class RankDeficient : public Error {
public:
  using Error::Error;
};

class PointOutsideElement : public Error {
public:
  using Error::Error;
};

class EdgeMismatch : public Error {
public:
  using Error::Error;
};

class SolverBreakdown : public Error {
public:
  using Error::Error;
};

class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Malformed mesh file; carries the 1-based line and column of the offending token.
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
  using Error::Error;
};

class UnknownName : public Error {
public:
  using Error::Error;
};

}  // namespace zfem
