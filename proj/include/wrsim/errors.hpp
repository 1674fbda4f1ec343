#pragma once

#include <stdexcept>
#include <string>

namespace wrsim {

/// Base class for all library errors.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public SimError {
 public:
  using SimError::SimError;
};

class IoError : public SimError {
 public:
  using SimError::SimError;
};

class UnknownBusReference : public SimError {
 public:
  explicit UnknownBusReference(int bus)
      : SimError("reference to unknown bus " + std::to_string(bus)),
        bus(bus) {}
  int bus;
};

class ZeroImpedance : public SimError {
 public:
  ZeroImpedance(int from, int to)
      : SimError("branch " + std::to_string(from) + "-" + std::to_string(to) +
                 " has zero series impedance"),
        from(from), to(to) {}
  int from, to;
};

class DimensionMismatch : public SimError {
 public:
  using SimError::SimError;
};

class MissingExternalValue : public SimError {
 public:
  explicit MissingExternalValue(int bus)
      : SimError("no frozen external value for coupled bus " +
                 std::to_string(bus)),
        bus(bus) {}
  int bus;
};

class NonConvergence : public SimError {
 public:
  NonConvergence(int iterations, double residual_norm)
      : SimError("no convergence after " + std::to_string(iterations) +
                 " iterations, residual " + std::to_string(residual_norm)),
        iterations(iterations), residual_norm(residual_norm) {}
  int iterations;
  double residual_norm;
};

class SingularJacobian : public SimError {
 public:
  explicit SingularJacobian(double pivot)
      : SimError("singular Jacobian, pivot " + std::to_string(pivot)),
        pivot(pivot) {}
  double pivot;
};

class NotConverged : public SimError {
 public:
  using SimError::SimError;
};

class StepFailure : public SimError {
 public:
  StepFailure(double t, const std::string& why)
      : SimError("step to t=" + std::to_string(t) + " failed: " + why),
        t(t) {}
  double t;
};

class WrDivergence : public SimError {
 public:
  WrDivergence(int iterations, double last_delta)
      : SimError("waveform relaxation did not converge in " +
                 std::to_string(iterations) + " iterations, last delta " +
                 std::to_string(last_delta)),
        iterations(iterations), last_delta(last_delta) {}
  int iterations;
  double last_delta;
};

class WindowFailure : public SimError {
 public:
  WindowFailure(int window, const std::string& why)
      : SimError("window " + std::to_string(window) + " failed: " + why),
        window(window) {}
  int window;
};

class PlanMismatch : public SimError {
 public:
  using SimError::SimError;
};

class GridMismatch : public SimError {
 public:
  using SimError::SimError;
};

class UnknownGenerator : public SimError {
 public:
  explicit UnknownGenerator(int bus)
      : SimError("no swing generator at bus " + std::to_string(bus)),
        bus(bus) {}
  int bus;
};

class AllSamplesExcluded : public SimError {
 public:
  using SimError::SimError;
};

}  // namespace wrsim
