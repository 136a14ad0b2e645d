#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mpmab/baselines.hpp"
#include "mpmab/defense.hpp"
#include "mpmab/player.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

/// Base for all attackers; counts the rounds in which an arm was pulled.
class Attacker : public Player {
 public:
  Action act(Round t) final {
    const Action a = decide(t);
    if (a.is_pull()) ++pulls_;
    return a;
  }
  void observe(Round, const Feedback&) override {}
  std::int64_t pulls() const { return pulls_; }

 protected:
  virtual Action decide(Round t) = 0;

 private:
  std::int64_t pulls_ = 0;
};

class SilentAttack final : public Attacker {
 protected:
  Action decide(Round) override { return Action::none(); }
};

/// Test helper: actions come from a callback, feedback goes to another.
class ScriptedAttack final : public Attacker {
 public:
  using Script = std::function<Action(Round)>;
  using Listener = std::function<void(Round, const Feedback&)>;
  explicit ScriptedAttack(Script script, Listener listener = {})
      : script_(std::move(script)), listener_(std::move(listener)) {}
  void observe(Round t, const Feedback& f) override {
    if (listener_) listener_(t, f);
  }

 protected:
  Action decide(Round t) override { return script_(t); }

 private:
  Script script_;
  Listener listener_;
};

/// Against MC: explore like the defenders, then squat the empirical best
/// arm through the musical chairs window, then go quiet.
class McAttack final : public Attacker {
 public:
  McAttack(int K, std::int64_t T, std::int64_t t0, Rng rng);
  void observe(Round t, const Feedback& f) override;
  std::int64_t budget() const { return t0_ + squat_rounds_; }
  std::optional<ArmIndex> squatted_arm() const { return best_; }

 protected:
  Action decide(Round t) override;

 private:
  int K_;
  std::int64_t t0_;
  std::int64_t squat_rounds_;
  Rng rng_;
  std::vector<std::int64_t> obs_;
  std::vector<double> sums_;
  std::optional<ArmIndex> best_;
  ArmIndex last_arm_ = 1;
};

/// Against SIC-MMAB: takes internal rank 1, shadows the highest ranked
/// defender through exploration and rewrites every statistic it receives
/// so that it accepts `target_arm`.
class SicMmabAttack final : public Attacker {
 public:
  SicMmabAttack(int K, std::int64_t T, Rng rng);
  SicMmabAttack(int K, std::int64_t T, ArmIndex target_arm);
  void observe(Round t, const Feedback& f) override;

  ArmIndex target_arm() const { return target_; }
  int estimated_players() const { return players_; }
  int internal_rank() const { return rank_; }
  bool done() const { return done_; }
  /// Last phase in which the attacker was active.
  int final_phase() const { return phase_; }
  static double budget(int K, std::int64_t T);

 private:
  Action decide(Round t) override;
  bool phase_is_last(int phase) const;

  int K_;
  std::int64_t T_;
  ArmIndex target_;
  std::int64_t chairs_rounds_;
  std::optional<PlayerCounter> counter_;
  int players_ = 1;
  int rank_ = 1;
  int phase_ = 0;
  Round phase_start_ = 0;
  bool done_ = false;
};

/// Against SIC-MMAB: inflates one defender's player count past K during
/// the player-estimation protocol.
class SicMmabDesyncAttack final : public Attacker {
 public:
  SicMmabDesyncAttack(int K, std::int64_t T);
  void observe(Round t, const Feedback& f) override;
  std::optional<ArmIndex> victim_arm() const { return victim_; }
  static std::int64_t budget(int K, std::int64_t T);

 protected:
  Action decide(Round t) override;

 private:
  int K_;
  std::int64_t quiet_rounds_;
  std::int64_t hop_ = 0;           // arms tried so far while searching
  std::optional<ArmIndex> victim_;
  std::int64_t follow_ = 0;        // rounds spent on the victim after finding it
  ArmIndex last_arm_ = 1;
};

/// Pulls one uniformly drawn arm for the first `budget` rounds.
class LowerBoundAttack final : public Attacker {
 public:
  LowerBoundAttack(int K, std::int64_t budget, Rng& rng) : arm_(uniform_arm(rng, K)), budget_(budget) {}
  ArmIndex arm() const { return arm_; }

 protected:
  Action decide(Round t) override { return t < budget_ ? Action::pull(arm_) : Action::none(); }

 private:
  ArmIndex arm_;
  std::int64_t budget_;
};

/// Half-open window [begin, end) of global rounds.
using Window = std::pair<Round, Round>;

/// One member of a centralized burst team: pulls its own arm during every
/// window and stays quiet otherwise.
class BurstAttack final : public Attacker {
 public:
  BurstAttack(ArmIndex arm, std::vector<Window> windows) : arm_(arm), windows_(std::move(windows)) {}

 protected:
  Action decide(Round t) override;

 private:
  ArmIndex arm_;
  std::vector<Window> windows_;
};

/// M distinct arms drawn uniformly, for a centralized team.
std::vector<ArmIndex> choose_distinct_arms(int K, int M, Rng& rng);

/// Uniformly random pulls for t < until, quiet afterwards.
class UniformAttack final : public Attacker {
 public:
  UniformAttack(int K, Round until, Rng rng) : K_(K), until_(until), rng_(std::move(rng)) {}

 protected:
  Action decide(Round t) override { return t < until_ ? Action::pull(uniform_arm(rng_, K_)) : Action::none(); }

 private:
  int K_;
  Round until_;
  Rng rng_;
};

}  // namespace mpmab
