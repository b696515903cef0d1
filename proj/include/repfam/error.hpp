#pragma once

#include <stdexcept>
#include <string>

namespace repfam {

/// Base of every error raised by the library. `code()` is the process exit
/// status the CLI uses for this error class.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    virtual int code() const noexcept { return 5; }
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

// numeric failures (exit code 5)
class NotNormal : public Error {
  public:
    using Error::Error;
};
class NoConvergence : public Error {
  public:
    using Error::Error;
};
class DomainError : public Error {
  public:
    using Error::Error;
};
class EmptySet : public Error {
  public:
    using Error::Error;
};
class NotSelfAdjoint : public Error {
  public:
    using Error::Error;
};
class NotElliptic : public Error {
  public:
    using Error::Error;
};
class NotCertified : public Error {
  public:
    using Error::Error;
};
class TruncationTooSmall : public Error {
  public:
    using Error::Error;
};
class CutoffTooSmall : public Error {
  public:
    using Error::Error;
};
class IoError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line, int column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    int code() const noexcept override { return 2; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

class UnsupportedModel : public Error {
  public:
    using Error::Error;
    int code() const noexcept override { return 3; }
};

class IncompatibleModel : public Error {
  public:
    using Error::Error;
    int code() const noexcept override { return 4; }
};

class IncompatibleQuery : public Error {
  public:
    using Error::Error;
    int code() const noexcept override { return 4; }
};

}  // namespace repfam
