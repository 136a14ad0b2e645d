#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mpmab {

/// Global round index, 0-based.
using Round = std::int64_t;

/// Arms are numbered 1..K everywhere outside of array storage.
using ArmIndex = int;

enum class SensingMode { kNonDistinguishable, kDistinguishable };

/// Maps an integer onto [1, modulus], sending residue 0 to `modulus`.
inline int wrap_index(std::int64_t value, int modulus) {
  const auto r = static_cast<int>(((value % modulus) + modulus) % modulus);
  return r == 0 ? modulus : r;
}

class InvalidActionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// What one player does in a round: pull an arm, or stay quiet.
class Action {
 public:
  static Action pull(ArmIndex arm) { return Action(arm); }
  static Action none() { return Action(0); }

  bool is_pull() const { return arm_ > 0; }
  ArmIndex arm() const { return arm_; }

  friend bool operator==(const Action&, const Action&) = default;

 private:
  explicit Action(ArmIndex arm) : arm_(arm) {}
  ArmIndex arm_;
};

/// Collision indicators split by who caused them.
struct CollisionSources {
  bool defenders = false;  // at least two defenders on the arm
  bool attackers = false;  // at least one attacker on the arm
};

struct Feedback {
  double reward = 0.0;
  bool collision = false;
  bool has_sources = false;  // set only under distinguishable sensing
  CollisionSources sources;

  bool defender_collision() const {
    if (!has_sources) throw ProtocolError("defender/attacker collision split requires distinguishable sensing");
    return sources.defenders;
  }
};

}  // namespace mpmab
