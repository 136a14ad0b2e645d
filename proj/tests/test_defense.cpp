#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "mpmab/defense.hpp"
#include "support.hpp"

using namespace mpmab;
using namespace mpmab::testing;

// Values computed independently with mpmath (natural log, 50 digits).
TEST_CASE("hopping length oracle") {
  CHECK(resync_t0(10, 100000, 0.05) == 538000);
  CHECK(resync_t0(1, 1, 1.0) == 8);
  CHECK(resync_t0(10, 100000, 0.1) == 134560);
  CHECK(resync_t0(5, 10000, 0.2) == 13160);
  CHECK(resync2_t0(10, 100000, 0.05) == 1076000);
  CHECK(resync_t0(10, 100000, 0.05, 3000) == 3000);
  CHECK_THROWS_AS(resync_t0(10, 100, 0.0), ParameterError);
  CHECK_THROWS_AS(resync2_t0(10, 100, -0.1), ParameterError);
  CHECK(orthogonalization_rounds(10, 100000) == 116);
}

TEST_CASE("build_opt") {
  const std::vector<std::int64_t> o{10, 10, 10};
  CHECK(build_opt(o, std::vector<double>{1, 9, 8}, 2) == std::vector<ArmIndex>{2, 3});
  CHECK(build_opt(std::vector<std::int64_t>{4, 4, 4, 4}, std::vector<double>{2, 2, 2, 2}, 3) ==
        std::vector<ArmIndex>{1, 2, 3});
  CHECK_THROWS_AS(build_opt(std::vector<std::int64_t>{1, 0}, std::vector<double>{1, 0}, 1), ProtocolError);
}

TEST_CASE("build_opt agrees with brute force top-N") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const int K = 2 + static_cast<int>(rng() % 8);
    const int N = 1 + static_cast<int>(rng() % K);
    std::vector<std::int64_t> o(static_cast<std::size_t>(K));
    std::vector<double> s(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      o[static_cast<std::size_t>(k)] = 1 + static_cast<std::int64_t>(rng() % 5);
      s[static_cast<std::size_t>(k)] = static_cast<double>(rng() % 4);
    }
    const auto opt = build_opt(o, s, N);
    REQUIRE(opt.size() == static_cast<std::size_t>(N));
    CHECK(std::is_sorted(opt.begin(), opt.end()));
    // Every selected arm must score at least as high as every unselected one,
    // and beat any lower-indexed unselected arm strictly.
    for (int k = 1; k <= K; ++k) {
      if (std::find(opt.begin(), opt.end(), k) != opt.end()) continue;
      const double mk = s[static_cast<std::size_t>(k - 1)] / static_cast<double>(o[static_cast<std::size_t>(k - 1)]);
      for (ArmIndex a : opt) {
        const double ma = s[static_cast<std::size_t>(a - 1)] / static_cast<double>(o[static_cast<std::size_t>(a - 1)]);
        CHECK(ma >= mk);
        if (k < a) CHECK(ma > mk);
      }
    }
  }
}

TEST_CASE("defender counting on ranks {2,5,7} of 10") {
  const std::vector<int> ranks{2, 5, 7};
  std::vector<PlayerCounter> c;
  for (int r : ranks) c.emplace_back(r, 10);
  for (std::int64_t step = 1; step <= 20; ++step) {
    std::vector<ArmIndex> arms;
    for (auto& x : c) arms.push_back(x.arm(step));
    for (std::size_t i = 0; i < c.size(); ++i)
      c[i].observe(step, std::count(arms.begin(), arms.end(), arms[i]) > 1);
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c[i].count() == 3);
    CHECK(c[i].rank() == static_cast<int>(i) + 1);
  }
  PlayerCounter alone(4, 6);
  CHECK(alone.count() == 1);
  CHECK(alone.rank() == 1);
}

TEST_CASE("orthogonalizer fixes on the first clean pull") {
  Orthogonalizer o(5);
  Rng rng(1);
  const ArmIndex a = o.next(rng);
  o.observe(true);
  CHECK_FALSE(o.rank());
  const ArmIndex b = o.next(rng);
  o.observe(false);
  REQUIRE(o.rank());
  CHECK(*o.rank() == b);
  for (int i = 0; i < 10; ++i) CHECK(o.next(rng) == b);
  (void)a;
}

TEST_CASE("orthogonalization finds the single free arm") {
  const int K = 6;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Orthogonalizer o(K);
    const ArmIndex free_arm = 1 + static_cast<int>(seed % K);
    for (std::int64_t t = 0; t < orthogonalization_rounds(K, 100000); ++t) {
      const ArmIndex a = o.next(rng);
      o.observe(a != free_arm);
    }
    REQUIRE(o.rank());
    CHECK(*o.rank() == free_arm);
  }
}

TEST_CASE("RESYNC hop and exploitation indexing") {
  ResyncDefender d({10, 3, 1, 30});
  CHECK(d.act(0) == Action::pull(1));

  ResyncDefender e({10, 2, 1, 30});
  e.force_epoch_state(0, EpochPhase::kExploitation, {2, 7});
  CHECK(e.act(4) == Action::pull(2));
  e.observe(4, {});
  CHECK(e.act(5) == Action::pull(7));
}

TEST_CASE("RESYNC protocol errors") {
  ResyncDefender d({4, 2, 1, 8});
  d.act(0);
  CHECK_THROWS_AS(d.act(1), ProtocolError);

  ResyncDefender e({4, 2, 1, 8});
  e.force_epoch_state(0, EpochPhase::kExploitation, {});
  CHECK_THROWS_AS(e.act(0), ProtocolError);
  CHECK_THROWS_AS(ResyncDefender({4, 5, 1, 8}), ParameterError);
}

TEST_CASE("RESYNC epoch layout partitions T_B") {
  ResyncDefender d({6, 3, 2, 60});
  CHECK(d.params().epoch_length() == 60 + 9 + 9 + 3);
  CHECK(d.stage_at(59) == ExplorationStage::kSequentialHopping);
  CHECK(d.stage_at(60) == ExplorationStage::kSensing);
  CHECK(d.stage_at(68) == ExplorationStage::kSensing);
  CHECK(d.stage_at(69) == ExplorationStage::kIntraCommunication);
  CHECK(d.stage_at(78) == ExplorationStage::kInterCommunication);
  CHECK(d.stage_at(81) == ExplorationStage::kSequentialHopping);
}

namespace {

const std::vector<double> kSpread{0.15, 0.9, 0.45, 0.75, 0.3, 0.6};

}  // namespace

TEST_CASE("RESYNC without attackers: explore once, then exploit orthogonally") {
  auto inst = make_instance(kSpread, 3, 20000);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto run = resync_run(inst, 3000, {}, seed);
    const std::int64_t tb = run.defender(0).params().epoch_length();
    // Sensing and communication collide on purpose; exploitation must not.
    bool defender_collision = false;
    run.sim->add_observer([&](const RoundRecord& r) {
      if (r.t < tb) return;
      for (std::size_t p = 0; p < 3; ++p)
        if (r.feedback[p].collision) defender_collision = true;
    });
    run.sim->run();
    CHECK_FALSE(defender_collision);
    const auto& ep = *run.epochs;
    REQUIRE(ep.size() > 2);
    CHECK(classify_state(ep[0]) == MetaState::kExplore);
    for (std::size_t e = 1; e < ep.size(); ++e) CHECK(classify_state(ep[e]) == MetaState::kExploit);
    for (int p = 0; p < 3; ++p) CHECK(run.defender(p).opt() == inst.optimal_arms());
  }
}

TEST_CASE("RESYNC observation counts only grow on clean rounds") {
  auto inst = make_instance(kSpread, 2, 4000);
  auto run = resync_run(inst, 300, one(std::make_unique<UniformAttack>(6, 4000, Rng(5))), 11);
  std::vector<std::int64_t> prev(6, 0);
  bool ok = true;
  bool restart_dropped = false;
  std::vector<bool> last_restart(2, false);
  std::int64_t last_epoch = -1;
  run.sim->add_observer([&](const RoundRecord& r) {
    auto& d = run.defender(0);
    const auto& o = d.observations();
    std::int64_t grown = 0;
    for (std::size_t k = 0; k < o.size(); ++k) grown += o[k] - prev[k];
    if (grown > (r.feedback[0].collision ? 0 : 1)) ok = false;
    prev = o;
    for (int p = 0; p < 2; ++p) {
      auto& q = run.defender(p);
      if (q.epoch() == last_epoch && last_restart[static_cast<std::size_t>(p)] && !q.restart()) restart_dropped = true;
      last_restart[static_cast<std::size_t>(p)] = q.restart();
    }
    last_epoch = d.epoch();
  });
  run.sim->run();
  CHECK(ok);
  CHECK_FALSE(restart_dropped);
}

TEST_CASE("exploitation collision only counts during the last N rounds") {
  auto inst = make_instance(kSpread, 2, 3 * (300 + 10));
  const std::int64_t tb = 300 + 8 + 2;
  // Epoch 1 is exploitation; hit defender 1's arm in the middle of it.
  auto mid = [&](Round t) { return t == tb + 50 ? Action::pull(4) : Action::none(); };
  auto run = resync_run(inst, 300, one(std::make_unique<ScriptedAttack>(mid)), 1);
  run.sim->run(2 * tb);
  const auto& ep = *run.epochs;
  REQUIRE(ep.size() == 2);
  CHECK(classify_state(ep[1]) == MetaState::kExploit);
  CHECK(ep[1].restart == std::vector<bool>{false, false});
}

TEST_CASE("sufficient observations need T0/K per arm") {
  auto inst = make_instance(kSpread, 2, 2000);
  // One collision in the first hop round starves defender 1 of one sample.
  auto hit = [](Round t) { return t == 0 ? Action::pull(1) : Action::none(); };
  auto run = resync_run(inst, 300, one(std::make_unique<ScriptedAttack>(hit)), 2);
  run.sim->run(300);
  CHECK_FALSE(run.defender(0).sufficient_observations());
  CHECK(run.defender(0).restart());
  CHECK(run.defender(1).sufficient_observations());
  CHECK_FALSE(run.defender(1).restart());
  run.sim->run(310);
  // Intra-communication carried the restart bit over.
  CHECK(run.defender(1).restart());
}

TEST_CASE("observations needed after c single-arm hits") {
  // Witness for the time to sufficiency under the single-arm, single-defender
  // attacker: the deficit on one arm is refilled one hop cycle at a time.
  const int K = 6;
  const std::int64_t t0 = 600;
  const std::int64_t tb = t0 + 8 + 2;
  auto inst = make_instance(kSpread, 2, 6 * tb);
  for (int c : {1, 3, 10}) {
    int hits = 0;
    auto script = [&](Round t) {
      if (t < t0 && wrap_index(t + 1, K) == 3 && hits < c) {
        ++hits;
        return Action::pull(3);
      }
      return Action::none();
    };
    auto run = resync_run(inst, t0, one(std::make_unique<ScriptedAttack>(script)), 3);
    Round ready = -1;
    run.sim->add_observer([&](const RoundRecord& r) {
      if (ready >= 0) return;
      for (int p = 0; p < 2; ++p)
        for (auto o : run.defender(p).observations())
          if (o * K < t0) return;
      ready = r.t + 1;
    });
    run.sim->run();
    REQUIRE(ready > 0);
    CHECK(ready <= tb + static_cast<Round>(K) * c);
    CHECK(run.sim->trace().final_attack_cost() == c);
  }
}

TEST_CASE("RESYNC2 without attackers") {
  auto inst = make_instance({0.1, 0.85, 0.4, 0.7, 0.25, 0.55}, 3, 20000);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::unique_ptr<Player>> team;
    for (int p = 0; p < 3; ++p)
      team.push_back(std::make_unique<Resync2Defender>(Resync2Params{6, 20000, 6000}, make_stream(seed, stream::player(p))));
    Simulation sim(inst, SensingMode::kDistinguishable, std::move(team), {}, make_stream(seed, 1));
    sim.run();
    std::set<int> ranks;
    for (int p = 0; p < 3; ++p) {
      auto& d = sim.player_as<Resync2Defender>(p);
      CHECK_FALSE(d.init_failed());
      CHECK(d.estimated_defenders() == 3);
      ranks.insert(d.internal_rank());
      CHECK(d.exploration_epochs() == d.clean_epochs_needed());
      CHECK(d.opt() == inst.optimal_arms());
    }
    CHECK(ranks == std::set<int>{1, 2, 3});
  }
}

TEST_CASE("RESYNC2 repeats only attacked epochs") {
  const int K = 6;
  auto inst = make_instance({0.1, 0.85, 0.4, 0.7, 0.25, 0.55}, 3, 20000);
  inst.attackers = 2;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::unique_ptr<Player>> team;
    for (int p = 0; p < 3; ++p)
      team.push_back(std::make_unique<Resync2Defender>(Resync2Params{K, 20000, 6000}, make_stream(seed, stream::player(p))));
    std::vector<std::unique_ptr<Player>> attackers;
    attackers.push_back(std::make_unique<UniformAttack>(K, 3000, make_stream(seed, stream::player(3))));
    attackers.push_back(std::make_unique<UniformAttack>(K, 3000, make_stream(seed, stream::player(4))));
    Simulation sim(inst, SensingMode::kDistinguishable, std::move(team), std::move(attackers), make_stream(seed, 1));
    // Attacked epochs, counted from the defenders' own exploration clock.
    std::set<std::int64_t> attacked;
    sim.add_observer([&](const RoundRecord& r) {
      auto& d = sim.player_as<Resync2Defender>(0);
      if (d.stage() == Resync2Stage::kExploration && r.attack_cost)
        attacked.insert((r.t - d.exploration_start()) / (2 * K));
    });
    sim.run();
    auto& d = sim.player_as<Resync2Defender>(0);
    CHECK(d.exploration_epochs() - d.clean_epochs() <= static_cast<std::int64_t>(attacked.size()));
  }
}
