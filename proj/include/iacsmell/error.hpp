#pragma once

#include <stdexcept>
#include <string>

namespace iacsmell {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownLanguage : public Error {
 public:
  using Error::Error;
};

class SpanOutOfRange : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class ManifestUnreadable : public Error {
 public:
  using Error::Error;
};

class MissingVerdict : public Error {
 public:
  MissingVerdict(std::size_t row, const std::string& what)
      : Error(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class UnknownScript : public Error {
 public:
  using Error::Error;
};

class UnparseableJudgment : public Error {
 public:
  using Error::Error;
};

// Gateway failures. AuthError is never retried; RateLimited is raised once
// retries are exhausted on 429/5xx.
class GatewayError : public Error {
 public:
  using Error::Error;
};

class AuthError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class RateLimited : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class Timeout : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class MalformedResponse : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

}  // namespace iacsmell
