#pragma once

#include <stdexcept>
#include <string>

namespace urbannet {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("parse error at line " + std::to_string(line) + ": " + reason), line(line) {}
  std::size_t line;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id) {}
};

class UnknownTractId : public Error {
 public:
  explicit UnknownTractId(const std::string& id) : Error("unknown tract id: " + id) {}
};

class DegeneratePolygon : public Error {
 public:
  explicit DegeneratePolygon(const std::string& why) : Error("degenerate polygon: " + why) {}
};

class NoFacilities : public Error {
 public:
  explicit NoFacilities(const std::string& kind) : Error("no facilities of kind: " + kind) {}
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& what) : Error("shape mismatch: " + what) {}
};

class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& where) : Error("non-finite value in " + where) {}
};

class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(const std::string& what) : Error("non-finite loss: " + what) {}
};

class SingleClass : public Error {
 public:
  explicit SingleClass(const std::string& where) : Error("only one class present in " + where) {}
};

class TooFewSamples : public Error {
 public:
  explicit TooFewSamples(const std::string& what) : Error("too few samples: " + what) {}
};

class LengthMismatch : public Error {
 public:
  explicit LengthMismatch(const std::string& what) : Error("length mismatch: " + what) {}
};

class EmptyCounts : public Error {
 public:
  EmptyCounts() : Error("empty class counts") {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

}  // namespace urbannet
