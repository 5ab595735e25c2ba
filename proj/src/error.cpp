#include "swta/error.hpp"

namespace swta {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Annihilated: return "pattern annihilated";
    case ErrorKind::MalformedHeader: return "malformed header";
    case ErrorKind::MalformedData: return "malformed data";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::Unreadable: return "unreadable file";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::EmptyPopulation: return "empty population";
    case ErrorKind::MissingPolarity: return "population lacks a polarity";
    case ErrorKind::Invariant: return "invariant violation";
  }
  return "unknown error";
}

}  // namespace swta
