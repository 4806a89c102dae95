// Error types shared across the simulator
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mochi {

/// Integration produced NaN/Inf. Carries the robot id when raised by the world.
class NonFiniteState : public std::runtime_error {
  public:
    explicit NonFiniteState(const std::string &what, int robot_id = -1)
        : std::runtime_error(what), robot_id_(robot_id) {}
    int robot_id() const noexcept { return robot_id_; }

  private:
    int robot_id_;
};

/// Pitch left the envelope where ZYX Euler angles are trusted (|theta| > 60 deg).
class AttitudeLimitExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace mochi
