#ifndef HAMLAB_ERROR_HPP
#define HAMLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hamlab {

/// Categories used to map failures onto CLI exit codes and test expectations.
enum class ErrorKind {
  malformed_input,   // bad graph / certificate / file contents
  parameter,         // a parameter outside an operation's declared range
  precondition,      // a caller-asserted precondition was checked and is false
  contract,          // an algorithm's guaranteed outcome did not materialise
  search_failure,    // a heuristic gave up (nonexistence not established)
  no_solution,       // an exact search established nonexistence
  unreachable,       // no walk / path between the requested endpoints
  wrong_pipeline,    // instance belongs to the other (not highly connected) case
  scale,             // instance too large for an exact routine
  generation,        // a randomized generator exhausted its retries
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_input: return "malformed-input";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::contract: return "contract";
    case ErrorKind::search_failure: return "search-failure";
    case ErrorKind::no_solution: return "no-solution";
    case ErrorKind::unreachable: return "unreachable";
    case ErrorKind::wrong_pipeline: return "wrong-pipeline";
    case ErrorKind::scale: return "scale";
    case ErrorKind::generation: return "generation";
  }
  return "unknown";
}

/// Library exception. `witness` optionally carries a vertex set that explains
/// the failure (a Hall violator, a separator, a blocking cluster set, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::vector<int> witness = {})
      : std::runtime_error(what), kind_(kind), witness_(std::move(witness)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<int>& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::vector<int> witness_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what,
                              std::vector<int> witness = {}) {
  throw Error(kind, what, std::move(witness));
}

}  // namespace hamlab

#endif  // HAMLAB_ERROR_HPP
