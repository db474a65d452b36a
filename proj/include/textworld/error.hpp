#pragma once

#include <stdexcept>
#include <string>

namespace textworld {

// Base for all engine failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files (scenes, atlases, corpora).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration; maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace textworld
