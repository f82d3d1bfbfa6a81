#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace procause {

// Base for every error raised by the library. `module()` names the pipeline
// stage that failed so the CLI can report it without guessing.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class ParseError : public Error {
 public:
  ParseError(std::string module, const std::string& message,
             std::optional<std::size_t> byte_offset = std::nullopt)
      : Error(std::move(module), message), byte_offset_(byte_offset) {}

  std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

 private:
  std::optional<std::size_t> byte_offset_;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Treated or control group empty (or too small) for a treatment.
class PositivityError : public Error {
 public:
  PositivityError(std::string module, const std::string& message, std::string treatment)
      : Error(std::move(module), message), treatment_(std::move(treatment)) {}

  const std::string& treatment() const noexcept { return treatment_; }

 private:
  std::string treatment_;
};

}  // namespace procause
