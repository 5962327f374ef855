#pragma once

#include <stdexcept>
#include <string>

namespace eyetrack {

// Error classes map onto CLI exit codes: ConfigError -> 1,
// SchemaError/ParseError/IntegrityError -> 2, TrainingError -> 3.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
  explicit TrainingError(const std::string& msg, double partial_objective = 0.0)
      : std::runtime_error(msg), partial_objective(partial_objective) {}
  double partial_objective;
};

}  // namespace eyetrack
