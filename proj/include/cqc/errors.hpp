#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cqc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed query text. `offset` is the byte offset of the offending input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A search or enumeration exceeded its configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A replaying TapeRng was asked for more bits than the tape holds.
class TapeUnderrun : public Error {
 public:
  using Error::Error;
};

/// Token sequence longer than the fixed encoding length.
class TokenOverflow : public Error {
 public:
  using Error::Error;
};

/// A rewrite was requested that cannot be applied to the pair.
class InapplicableRewrite : public Error {
 public:
  using Error::Error;
};

/// No permitted rewrite could be applied within the retry bound.
class ExhaustedRetries : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset file, CSV input or certificate.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Record produced by a generator this build does not know how to replay.
class VersionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace cqc
