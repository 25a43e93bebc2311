#pragma once

#include <stdexcept>
#include <string>

namespace promptbo {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class VocabError : public Error {
  public:
    using Error::Error;
};

class SpaceError : public Error {
  public:
    using Error::Error;
};

class GpError : public Error {
  public:
    using Error::Error;
};

// Cholesky failed even at the largest jitter level.
class FactorizationError : public GpError {
  public:
    using GpError::GpError;
};

class MetricsError : public Error {
  public:
    using Error::Error;
};

// Anything that goes wrong while scoring a prompt.
class EvaluationError : public Error {
  public:
    using Error::Error;
};

class TransportError : public EvaluationError {
  public:
    using EvaluationError::EvaluationError;
};

class SchemaError : public EvaluationError {
  public:
    using EvaluationError::EvaluationError;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace promptbo
