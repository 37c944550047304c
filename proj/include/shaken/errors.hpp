#pragma once

#include <stdexcept>
#include <string>

namespace shaken {

// Invalid user-facing configuration or malformed input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-finite values, truncation breakdown, divergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Population leaked to the edge of the plane-wave basis.
class BasisOverflowError : public NumericalError {
 public:
  BasisOverflowError(std::size_t step, double edge_population)
      : NumericalError("basis overflow at step " + std::to_string(step) +
                       ": edge population " + std::to_string(edge_population)),
        step_(step),
        edge_population_(edge_population) {}

  std::size_t step() const noexcept { return step_; }
  double edge_population() const noexcept { return edge_population_; }

 private:
  std::size_t step_;
  double edge_population_;
};

}  // namespace shaken
