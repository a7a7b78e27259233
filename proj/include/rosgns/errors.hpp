#pragma once

#include <stdexcept>
#include <string>

namespace rosgns {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto stable exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A documented precondition of an operation was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// |D| = 0: the corpus produced no word-context pairs.
class DegenerateCorpus : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class UndefinedCorrelation : public Error {
 public:
  UndefinedCorrelation(const std::string& what, std::size_t pairs_used = 0,
                       std::size_t pairs_total = 0)
      : Error(what), pairs_used_(pairs_used), pairs_total_(pairs_total) {}

  std::size_t pairs_used() const { return pairs_used_; }
  std::size_t pairs_total() const { return pairs_total_; }

 private:
  std::size_t pairs_used_;
  std::size_t pairs_total_;
};

// Training produced a non-finite objective.
class NumericalAbort : public Error {
 public:
  NumericalAbort(const std::string& what, int iteration)
      : Error(what), iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace rosgns
