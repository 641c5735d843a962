#pragma once

#include <stdexcept>
#include <string>

namespace evobench {

/// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input document. `where` is a JSON-pointer-ish locator
/// ("/databases/User/attributes/3/type") or a byte offset for syntax errors.
struct ParseError : Error {
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where(where) {}
  std::string where;
};

/// Delta application hit an element that is missing (removal) or already
/// present (addition). The message names the offending element.
struct ConflictError : Error {
  using Error::Error;
};

/// Random walk could not produce an admissible path.
struct NoPathError : Error {
  using Error::Error;
};

/// Saturation found no walk-discoverable shortcut candidates.
struct NoCandidatesError : Error {
  using Error::Error;
};

/// A proposer returned a structurally unusable proposal. Never auto-repaired.
struct ProposerError : Error {
  using Error::Error;
};

/// Scenario prerequisites reference attributes or databases the graph lacks.
struct SchemaMismatchError : Error {
  using Error::Error;
};

/// Snapshot token does not name a stored snapshot.
struct UnknownTokenError : Error {
  using Error::Error;
};

/// Reference walk ran out of frontier before reaching the goal.
struct WalkStuckError : Error {
  using Error::Error;
};

/// Sampled task scope kept no tool-bearing edge after bounded retries.
struct NoToolsInScopeError : Error {
  using Error::Error;
};

/// An operation's entry guard rejected its input (e.g. a scope with nothing
/// to accomplish).
struct PreconditionError : Error {
  using Error::Error;
};

/// An agent policy produced a structurally unusable action. run_task
/// converts this into a failed attempt rather than letting it escape.
struct PolicyError : Error {
  using Error::Error;
};

/// Bad pipeline configuration or command-line usage.
struct ConfigError : Error {
  using Error::Error;
};

/// Remote adapter transport or wire-format failure.
struct AdapterError : Error {
  using Error::Error;
};

}  // namespace evobench
