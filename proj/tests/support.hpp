#pragma once

// Scenario builders shared by the unit and acceptance suites.

#include <memory>
#include <vector>

#include "mpmab/attack.hpp"
#include "mpmab/defense.hpp"
#include "mpmab/harness.hpp"
#include "mpmab/metagame.hpp"
#include "mpmab/simulation.hpp"

namespace mpmab::testing {

inline BanditInstance make_instance(std::vector<double> means, int N, Round T) {
  BanditInstance inst;
  inst.means = std::move(means);
  inst.defenders = N;
  inst.horizon = T;
  return inst;
}

/// A RESYNC team on a fixed instance with its epoch log attached.
struct ResyncRun {
  std::unique_ptr<std::vector<EpochRecord>> epochs = std::make_unique<std::vector<EpochRecord>>();
  std::unique_ptr<Simulation> sim;

  ResyncDefender& defender(int p) { return sim->player_as<ResyncDefender>(p); }
};

inline ResyncRun resync_run(const BanditInstance& inst, std::int64_t t0, std::vector<std::unique_ptr<Player>> attackers,
                            std::uint64_t seed) {
  ResyncRun r;
  std::vector<std::unique_ptr<Player>> team;
  for (int p = 0; p < inst.defenders; ++p)
    team.push_back(std::make_unique<ResyncDefender>(ResyncParams{inst.arms(), inst.defenders, p + 1, t0}));
  r.sim = std::make_unique<Simulation>(inst, SensingMode::kNonDistinguishable, std::move(team), std::move(attackers),
                                       make_stream(seed, stream::kEnvironment));
  record_resync_epochs(*r.sim, inst.defenders, *r.epochs);
  return r;
}

inline std::vector<std::unique_ptr<Player>> one(std::unique_ptr<Player> p) {
  std::vector<std::unique_ptr<Player>> v;
  v.push_back(std::move(p));
  return v;
}

/// Holds a PlayerCounter and reads only defender-caused collisions.
class CountingProbe final : public Player {
 public:
  CountingProbe(int external_rank, int K) : counter_(external_rank, K) {}
  Action act(Round t) override { return Action::pull(counter_.arm(t + 1)); }
  void observe(Round t, const Feedback& f) override { counter_.observe(t + 1, f.defender_collision()); }
  const PlayerCounter& counter() const { return counter_; }

 private:
  PlayerCounter counter_;
};

}  // namespace mpmab::testing
