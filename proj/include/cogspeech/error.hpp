#pragma once

#include <stdexcept>
#include <string>

namespace cogspeech {

// Base class for all errors raised by the pipeline.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// File missing, unreadable, or not writable.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (manifest, feature store, transcript, wav, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input violates a documented invariant (duplicate id, range, shape mismatch).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad experiment configuration, detected before any compute starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cogspeech
