#pragma once

#include "mpmab/types.hpp"

namespace mpmab {

/// A decentralized agent. The simulation calls act() for every player,
/// resolves the round, then calls observe() on every player that pulled.
class Player {
 public:
  virtual ~Player() = default;
  virtual Action act(Round t) = 0;
  virtual void observe(Round t, const Feedback& feedback) = 0;
};

}  // namespace mpmab
