#pragma once

#include <stdexcept>
#include <string>

namespace stadium {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// No staggered lattice point is strictly inside the domain at the requested spacing.
class EmptyGridError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix sizes disagree, or more eigenpairs were requested than exist.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class ZeroFieldError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Reflection requested on a grid that is not closed under axis reflections (quadrant grids).
class NotReflectionClosedError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class EmptyTableError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace stadium
