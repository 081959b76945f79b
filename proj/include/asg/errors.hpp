#pragma once

#include <stdexcept>
#include <string>

namespace asg {

// Configuration and asset problems (config files, priors, thresholds).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scene file problems (missing, malformed, failed validation).
struct SceneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Procedural placement could not satisfy the template constraints.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No navigable viewpoint survives pruning.
struct SceneUnnavigableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace asg
