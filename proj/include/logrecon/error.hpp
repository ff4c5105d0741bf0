#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace logrecon {

// Base for every error raised by the library. The CLI maps subclasses onto
// exit codes: ParseError/ConfigError -> 1, IoError -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. `line` is 1-based when the input is line oriented, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& cause)
      : Error(line ? "line " + std::to_string(line) + ": " + cause : cause), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Corrupted engine file; `offset` is the byte offset of the offending frame or page.
class CorruptionError : public Error {
 public:
  CorruptionError(std::uint64_t offset, const std::string& cause)
      : Error("offset " + std::to_string(offset) + ": " + cause), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// A workload step that the selected engine cannot execute. `step` is 0-based.
class StepError : public Error {
 public:
  StepError(std::size_t step, const std::string& cause)
      : Error("step " + std::to_string(step) + ": " + cause), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace logrecon
