#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "mpmab/attack.hpp"
#include "support.hpp"

using namespace mpmab;
using namespace mpmab::testing;

TEST_CASE("silent and empty budgets never pull") {
  SilentAttack s;
  Rng rng(1);
  LowerBoundAttack lb(10, 0, rng);
  BurstAttack burst(3, {});
  for (Round t = 0; t < 1000; ++t) {
    CHECK_FALSE(s.act(t).is_pull());
    CHECK_FALSE(lb.act(t).is_pull());
    CHECK_FALSE(burst.act(t).is_pull());
  }
}

TEST_CASE("lower-bound attacker pulls one arm for C rounds") {
  Rng rng(4);
  LowerBoundAttack lb(10, 250, rng);
  for (Round t = 0; t < 1000; ++t) {
    const auto a = lb.act(t);
    CHECK(a.is_pull() == (t < 250));
    if (a.is_pull()) CHECK(a.arm() == lb.arm());
  }
  CHECK(lb.pulls() == 250);
}

TEST_CASE("lower-bound arm is uniform") {
  Rng rng(9);
  std::vector<int> hits(11, 0);
  for (int i = 0; i < 20000; ++i) ++hits[static_cast<std::size_t>(LowerBoundAttack(10, 1, rng).arm())];
  for (int k = 1; k <= 10; ++k) CHECK(std::abs(hits[static_cast<std::size_t>(k)] - 2000) < 200);
}

TEST_CASE("burst windows") {
  BurstAttack b(7, {{0, 3000}, {50000, 53000}});
  CHECK(b.act(0) == Action::pull(7));
  CHECK(b.act(2999) == Action::pull(7));
  CHECK_FALSE(b.act(3000).is_pull());
  CHECK_FALSE(b.act(49999).is_pull());
  CHECK(b.act(50000) == Action::pull(7));
  CHECK_FALSE(b.act(53000).is_pull());
  Rng rng(2);
  const auto arms = choose_distinct_arms(10, 4, rng);
  CHECK(std::set<ArmIndex>(arms.begin(), arms.end()).size() == 4);
}

TEST_CASE("uniform attacker stops on time") {
  UniformAttack u(10, 5000, Rng(3));
  for (Round t = 0; t < 6000; ++t) CHECK(u.act(t).is_pull() == (t < 5000));
}

TEST_CASE("MC attack schedule") {
  McAttack a(10, 100000, 3000, Rng(5));
  for (Round t = 0; t < 5000; ++t) {
    const auto x = a.act(t);
    if (x.is_pull()) a.observe(t, {0.5, false});
    CHECK(x.is_pull() == (t < 3000 + 116));
  }
  CHECK(a.pulls() == a.budget());
}

TEST_CASE("desync attack without defenders hops forever") {
  SicMmabDesyncAttack a(5, 100);
  const auto quiet = orthogonalization_rounds(5, 100);
  for (Round t = 0; t < 200; ++t) {
    const auto x = a.act(t);
    CHECK(x.is_pull() == (t >= quiet));
    if (x.is_pull()) {
      CHECK(x.arm() == wrap_index(t - quiet + 1, 5));
      a.observe(t, {0.3, false});
    }
  }
  CHECK_FALSE(a.victim_arm());
}

TEST_CASE("SIC-MMAB attack shadows the top-ranked defender") {
  const int K = 10;
  const Round T = 100000;
  auto inst = make_instance({0.1, 0.9, 0.35, 0.75, 0.5, 0.2, 0.65, 0.05, 0.8, 0.3}, 3, T);
  inst.attackers = 1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::vector<std::unique_ptr<Player>> team;
    for (int p = 0; p < 3; ++p) team.push_back(std::make_unique<SicMmabDefender>(K, T, make_stream(seed, 16 + p)));
    Simulation sim(inst, SensingMode::kNonDistinguishable, std::move(team),
                   one(std::make_unique<SicMmabAttack>(K, T, make_stream(seed, 19))), make_stream(seed, 1));
    auto& attacker = sim.player_as<SicMmabAttack>(3);
    std::int64_t explore_rounds = 0, missed = 0;
    sim.add_observer([&](const RoundRecord& r) {
      for (int p = 0; p < 3; ++p) {
        auto& d = sim.player_as<SicMmabDefender>(p);
        if (d.internal_rank() != 4 || d.stage() != SicStage::kExploration || attacker.done()) continue;
        ++explore_rounds;
        if (!r.feedback[static_cast<std::size_t>(p)].collision) ++missed;
      }
    });
    sim.run();
    if (attacker.estimated_players() != 4 || attacker.internal_rank() != 1) continue;  // init failed
    CHECK(explore_rounds > 0);
    CHECK(missed == 0);
    CHECK(static_cast<double>(attacker.pulls()) <= SicMmabAttack::budget(K, T));
  }
}

TEST_CASE("desync attack pushes a player count past K") {
  const int K = 10;
  const Round T = 20000;
  auto inst = make_instance({0.1, 0.9, 0.35, 0.75, 0.5, 0.2, 0.65, 0.05, 0.8, 0.3}, 3, T);
  inst.attackers = 1;
  int faulted = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::unique_ptr<Player>> team;
    for (int p = 0; p < 3; ++p) team.push_back(std::make_unique<SicMmabDefender>(K, T, make_stream(seed, 16 + p)));
    Simulation sim(inst, SensingMode::kNonDistinguishable, std::move(team),
                   one(std::make_unique<SicMmabDesyncAttack>(K, T)), make_stream(seed, 1));
    sim.run();
    int worst = 0;
    for (int p = 0; p < 3; ++p) {
      auto& d = sim.player_as<SicMmabDefender>(p);
      worst = std::max(worst, d.estimated_players());
      if (d.estimated_players() > K) CHECK(d.desync_fault());
    }
    if (worst > K) ++faulted;
    CHECK(sim.player_as<SicMmabDesyncAttack>(3).pulls() <= SicMmabDesyncAttack::budget(K, T));
  }
  CHECK(faulted == 10);
}
