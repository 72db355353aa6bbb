#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lpnet {

/// Base class for all recoverable lpnet errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (configs, graph files, parameters).
struct ConfigError : Error {
  using Error::Error;
};

struct GraphError : Error {
  using Error::Error;
};
struct DisconnectedGraph : GraphError {
  using GraphError::GraphError;
};
struct SelfLoop : GraphError {
  using GraphError::GraphError;
};
struct DuplicateEdge : GraphError {
  using GraphError::GraphError;
};

/// A time step produced a NaN or infinity; carries the 1-based step index.
struct NonFiniteState : Error {
  explicit NonFiniteState(std::int64_t step_index)
      : Error("non-finite state at step " + std::to_string(step_index)),
        step(step_index) {}
  std::int64_t step;
};

struct ZeroState : Error {
  using Error::Error;
};
struct EmptyWindow : Error {
  using Error::Error;
};
struct TooFewPoints : Error {
  using Error::Error;
};
struct EigensolverError : Error {
  using Error::Error;
};

}  // namespace lpnet
