#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swta {

enum class ErrorKind {
  Parameter,        // out-of-domain argument
  Shape,            // dimension / shape disagreement between operands
  Annihilated,      // pattern has no mass left to normalize
  MalformedHeader,  // image / matrix file header unparsable
  MalformedData,    // body token unparsable or out of range
  DimensionMismatch,// declared dimensions disagree with body
  Unreadable,       // file missing or cannot be opened
  Io,               // write failure
  Config,           // unknown key, bad value in a config file
  EmptyPopulation,
  MissingPolarity,
  Invariant,        // internal invariant violated
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace swta
