#pragma once

#include <stdexcept>
#include <string>

namespace sockaudit {

// Base for every error raised by the library. Callers that only need to
// report a failure can catch this; the subclasses exist so tests and the CLI
// can tell the failure classes apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an operation's domain: inadmissible code, bad parameter,
// malformed snapshot.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A score over an empty (or empty-after-discard) list.
class UndefinedScore : public Error {
 public:
  using Error::Error;
};

// Cohen's kappa with chance agreement of exactly 1.
class UndefinedKappa : public Error {
 public:
  using Error::Error;
};

class MissingLabel : public Error {
 public:
  using Error::Error;
};

// Unknown video, query or run.
class NotFound : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class Unfeaturizable : public Error {
 public:
  using Error::Error;
};

// Malformed file content (run logs, label tables, configs, models).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A platform call failed. Adapters throw this for transient failures; the
// scenario engine retries before giving up on the run.
class AdapterError : public Error {
 public:
  using Error::Error;
};

// A comparison point (S1/E1/E2) could not be built from a run.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

// Invalid study configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sockaudit
