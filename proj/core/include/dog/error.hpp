#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dog {

// Base for every error raised by the library. Callers that only care about
// "something in dog failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid decoder configuration (beam size or step budget of zero, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: triple files, datasets, vocab files, scorer tables.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Text that the tokenizer adapter cannot represent losslessly.
class EncodeError : public Error {
 public:
  using Error::Error;
};

// Prompt template missing a slot or carrying it twice.
class TemplateError : public Error {
 public:
  using Error::Error;
};

// Internal contract broken by the caller (e.g. expanding with a triplet that
// was never eligible). Indicates a bug, not bad data.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// No eligible triplet left for the current reasoning step.
class DeadEndError : public Error {
 public:
  using Error::Error;
};

// Every candidate dead-ended before producing a single triplet.
class NoChainError : public Error {
 public:
  using Error::Error;
};

}  // namespace dog
