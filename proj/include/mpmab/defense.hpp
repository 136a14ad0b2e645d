#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mpmab/player.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

// ---------------------------------------------------------------------------
// Shared pieces

/// Sequential-hopping length 8K * ceil(ln(2K^2 T) / delta^2) used by RESYNC.
/// Returns `override_rounds` verbatim when set.
std::int64_t resync_t0(int K, std::int64_t T, double delta, std::optional<std::int64_t> override_rounds = {});
/// Same with the 16K constant used by RESYNC2's exploration.
std::int64_t resync2_t0(int K, std::int64_t T, double delta, std::optional<std::int64_t> override_rounds = {});

/// ceil(K ln T): length of the orthogonalization / musical chairs phase.
std::int64_t orthogonalization_rounds(int K, std::int64_t T);

/// The N arms with the largest empirical means s_i/o_i, returned in
/// ascending arm order. Ties in the empirical mean go to the lower index.
/// Throws ProtocolError if any arm has no observation.
std::vector<ArmIndex> build_opt(std::span<const std::int64_t> observations, std::span<const double> reward_sums, int N);

/// Top-N selection on already computed scores, same tie-break as build_opt.
std::vector<ArmIndex> top_arms(std::span<const double> scores, int N);

/// Arm pulled at round `step` (1-based, 1..2K) of the defender-counting
/// protocol by the player sitting on external rank `external_rank`.
ArmIndex counting_arm(int external_rank, int K, std::int64_t step);

/// Musical-chairs style rank fixing: pull uniformly at random until the
/// first collision-free pull, then stay on that arm.
class Orthogonalizer {
 public:
  explicit Orthogonalizer(int K) : K_(K) {}
  ArmIndex next(Rng& rng) {
    last_ = fixed_ ? *fixed_ : uniform_arm(rng, K_);
    return last_;
  }
  void observe(bool collision) {
    if (!fixed_ && !collision) fixed_ = last_;
  }
  std::optional<ArmIndex> rank() const { return fixed_; }

 private:
  int K_;
  ArmIndex last_ = 1;
  std::optional<ArmIndex> fixed_;
};

/// Player-count / internal-rank estimation over 2K rounds. Each
/// collision counted increments the count; those met while still sitting
/// on the own arm also increment the rank.
class PlayerCounter {
 public:
  PlayerCounter(int external_rank, int K) : external_rank_(external_rank), K_(K) {}
  ArmIndex arm(std::int64_t step) const { return counting_arm(external_rank_, K_, step); }
  void observe(std::int64_t step, bool collision) {
    if (!collision) return;
    ++count_;
    if (step <= 2 * static_cast<std::int64_t>(external_rank_)) ++rank_;
  }
  int count() const { return count_; }
  int rank() const { return rank_; }

 private:
  int external_rank_;
  int K_;
  int count_ = 1;
  int rank_ = 1;
};

// ---------------------------------------------------------------------------
// RESYNC (non-distinguishable sensing, N and internal rank known)

enum class EpochPhase { kExploration, kExploitation };

enum class ExplorationStage { kSequentialHopping, kSensing, kIntraCommunication, kInterCommunication };

struct ResyncParams {
  int K = 2;
  int N = 1;
  int rank = 1;             // internal rank j in [N]
  std::int64_t t0 = 1;      // sequential hopping rounds per exploration epoch

  std::int64_t epoch_length() const { return t0 + 2LL * N * N + N; }
};

/// One RESYNC defender. Epochs are aligned on global rounds:
/// epoch e covers [e*T_B, (e+1)*T_B).
class ResyncDefender final : public Player {
 public:
  explicit ResyncDefender(ResyncParams params);

  Action act(Round t) override;
  void observe(Round t, const Feedback& feedback) override;

  const ResyncParams& params() const { return params_; }
  std::int64_t epoch() const { return epoch_; }
  EpochPhase phase() const { return phase_; }
  bool restart() const { return restart_; }
  bool sufficient_observations() const { return sufficient_; }
  const std::vector<ArmIndex>& opt() const { return opt_; }
  const std::vector<std::int64_t>& observations() const { return obs_; }
  const std::vector<double>& reward_sums() const { return sums_; }

  /// Where round t falls inside an exploration epoch.
  ExplorationStage stage_at(Round t) const;

  /// Test hook: puts the defender in a given state at the start of an epoch.
  void force_epoch_state(std::int64_t epoch, EpochPhase phase, std::vector<ArmIndex> opt);
  void seed_observations(std::vector<std::int64_t> obs, std::vector<double> sums);

 private:
  void begin_epoch(std::int64_t epoch);
  void finish_hopping();
  Action exploration_action(Round t, std::int64_t offset);
  Action exploitation_action(Round t, std::int64_t offset) const;

  ResyncParams params_;
  std::int64_t epoch_ = -1;
  EpochPhase phase_ = EpochPhase::kExploration;
  bool restart_ = true;
  bool sufficient_ = false;
  bool hopping_done_ = false;
  std::vector<std::int64_t> obs_;
  std::vector<double> sums_;
  std::vector<ArmIndex> opt_;
  std::optional<Round> awaiting_;
  ArmIndex last_arm_ = 1;
};

// ---------------------------------------------------------------------------
// RESYNC2 (distinguishable sensing, N and ranks estimated online)

enum class Resync2Stage { kOrthogonalization, kCounting, kExploration, kExploitation };

struct Resync2Params {
  int K = 2;
  std::int64_t horizon = 1;  // T, sets the orthogonalization length
  std::int64_t t0 = 2;       // exploration budget; ceil(t0 / 2K) clean epochs
};

class Resync2Defender final : public Player {
 public:
  Resync2Defender(Resync2Params params, Rng rng);

  Action act(Round t) override;
  void observe(Round t, const Feedback& feedback) override;

  Resync2Stage stage() const { return stage_; }
  std::optional<ArmIndex> external_rank() const { return external_rank_; }
  int estimated_defenders() const { return n_hat_; }
  int internal_rank() const { return rank_; }
  bool init_failed() const { return init_failed_; }
  const std::vector<ArmIndex>& opt() const { return opt_; }
  std::int64_t clean_epochs_needed() const;
  std::int64_t clean_epochs() const { return clean_epochs_; }
  std::int64_t exploration_epochs() const { return exploration_epochs_; }
  Round exploration_start() const { return exploration_start_; }
  /// First exploitation round, if reached.
  std::optional<Round> exploitation_start() const { return exploitation_start_; }
  const std::vector<std::int64_t>& observations() const { return obs_; }

 private:
  void enter_counting(Round t);
  void enter_exploration(Round t);
  void close_epoch(Round t);

  Resync2Params params_;
  Rng rng_;
  std::int64_t orth_rounds_;
  Resync2Stage stage_ = Resync2Stage::kOrthogonalization;
  Orthogonalizer orth_;
  std::optional<PlayerCounter> counter_;
  std::optional<ArmIndex> external_rank_;
  bool init_failed_ = false;
  int n_hat_ = 1;
  int rank_ = 1;
  Round counting_start_ = 0;
  Round exploration_start_ = 0;
  Round epoch_start_ = 0;
  bool restart_ = false;
  std::int64_t clean_epochs_ = 0;
  std::int64_t exploration_epochs_ = 0;
  std::optional<Round> exploitation_start_;
  std::vector<std::int64_t> obs_;
  std::vector<double> sums_;
  std::vector<ArmIndex> opt_;
  std::optional<Round> awaiting_;
  ArmIndex last_arm_ = 1;
};

}  // namespace mpmab
