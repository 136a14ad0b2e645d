#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mpmab/env.hpp"
#include "mpmab/player.hpp"

namespace mpmab {

/// Everything that happened in one round.
struct RoundRecord {
  Round t = 0;
  std::vector<Action> actions;
  std::vector<Feedback> feedback;
  double regret = 0.0;
  int attack_cost = 0;
};

/// Round-lockstep driver for one run. Defenders occupy player slots
/// 0..N-1 and attackers N..N+M-1.
class Simulation {
 public:
  using Observer = std::function<void(const RoundRecord&)>;

  Simulation(BanditInstance instance, SensingMode sensing, std::vector<std::unique_ptr<Player>> defenders,
             std::vector<std::unique_ptr<Player>> attackers, Rng env_rng);

  /// Plays one round and returns its record.
  const RoundRecord& step();
  /// Plays until `horizon` rounds have elapsed (or instance.horizon).
  void run(Round horizon);
  void run() { run(instance_.horizon); }

  void add_observer(Observer observer) { observers_.push_back(std::move(observer)); }

  Round now() const { return t_; }
  const BanditInstance& instance() const { return instance_; }
  const RunTrace& trace() const { return trace_; }
  Player& player(int index) { return *players_.at(static_cast<std::size_t>(index)); }
  template <class T>
  T& player_as(int index) { return dynamic_cast<T&>(player(index)); }

 private:
  BanditInstance instance_;
  SensingMode sensing_;
  std::vector<std::unique_ptr<Player>> players_;
  Rng env_rng_;
  Round t_ = 0;
  RunTrace trace_;
  RoundRecord last_;
  std::vector<Observer> observers_;
};

}  // namespace mpmab
