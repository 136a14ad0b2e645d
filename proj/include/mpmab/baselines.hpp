#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mpmab/defense.hpp"
#include "mpmab/player.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

/// ceil(max(64K ln(4K^2 T) / gap^2, K^2 ln(4T) / 0.02)), the exploration
/// length the MC analysis asks for.
std::int64_t mc_t0(int K, std::int64_t T, double min_gap);

// ---------------------------------------------------------------------------
// MC: uniform exploration, then musical chairs on the empirical top N.

enum class McPhase { kExplore, kMusicalChairs, kCommitted };

class McDefender final : public Player {
 public:
  McDefender(int K, int N, std::int64_t t0, Rng rng);

  Action act(Round t) override;
  void observe(Round t, const Feedback& feedback) override;

  McPhase phase() const { return phase_; }
  std::optional<ArmIndex> committed_arm() const { return committed_; }
  const std::vector<ArmIndex>& candidates() const { return top_; }

 private:
  int K_;
  int N_;
  std::int64_t t0_;
  Rng rng_;
  McPhase phase_ = McPhase::kExplore;
  std::vector<std::int64_t> obs_;
  std::vector<double> sums_;
  std::vector<ArmIndex> top_;
  std::optional<ArmIndex> committed_;
  ArmIndex last_arm_ = 1;
};

// ---------------------------------------------------------------------------
// SIC-MMAB

/// Pulls emitted by a sender transmitting `statistic` in p+1 bits, low bit
/// first: arm `receiver_arm` for a 1 bit, `own_arm` for a 0 bit.
std::vector<ArmIndex> send_pulls(ArmIndex receiver_arm, std::int64_t statistic, int phase, ArmIndex own_arm);

/// Largest statistic representable in phase p: 2^{p+1} - 1.
inline std::int64_t max_statistic(int phase) { return (std::int64_t{1} << (phase + 1)) - 1; }

/// Quantizes a phase mean in [0,1] to an integer in [0, 2^{p+1} - 1].
std::int64_t quantize_statistic(double mean, int phase);

/// b_s = 3 sqrt(ln T / (2s)).
double confidence_width(std::int64_t T, std::int64_t pulls);

/// Fixed SIC-MMAB schedule for one phase given the active population.
struct SicPhaseLayout {
  int phase = 1;
  int players = 1;           // M_p
  int arms = 1;              // K_p
  std::int64_t exploration_length() const { return static_cast<std::int64_t>(arms) << phase; }
  std::int64_t block_length() const { return phase + 1; }
  std::int64_t communication_length() const {
    return static_cast<std::int64_t>(players) * (players - 1) * arms * block_length();
  }
};

/// One communication round decoded: sender i, receiver l (internal ranks),
/// arm position k in the active list, bit index b.
struct CommSlot {
  int sender;
  int receiver;
  int arm_pos;
  int bit;
};
CommSlot comm_slot(const SicPhaseLayout& layout, std::int64_t offset);

enum class SicStage { kMusicalChairs, kEstimatePlayers, kExploration, kCommunication, kFixed };

/// Exact running estimate of one arm: num / den.
struct SicEstimate {
  std::int64_t num = 0;
  std::int64_t den = 0;
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
};

class SicMmabDefender final : public Player {
 public:
  SicMmabDefender(int K, std::int64_t T, Rng rng);

  Action act(Round t) override;
  void observe(Round t, const Feedback& feedback) override;

  SicStage stage() const { return stage_; }
  int phase() const { return layout_.phase; }
  int estimated_players() const { return m_hat_; }
  int internal_rank() const { return rank_; }
  std::optional<ArmIndex> external_rank() const { return external_rank_; }
  std::optional<ArmIndex> fixed_arm() const { return fixed_; }
  bool desync_fault() const { return desync_fault_; }
  bool init_failed() const { return init_failed_; }
  const std::vector<ArmIndex>& active_arms() const { return active_; }
  /// Estimates indexed by arm (entry k-1 for arm k), as of the last
  /// completed communication phase.
  const std::vector<SicEstimate>& estimates() const { return estimates_; }
  /// Phase whose communication produced estimates(); 0 before any.
  int estimates_phase() const { return estimates_phase_; }
  std::int64_t pulls_per_arm() const { return pulls_per_arm_; }

 private:
  void start_phase(Round t, int phase);
  void finish_communication(Round t);
  ArmIndex active_arm(std::int64_t position);
  void fix(ArmIndex arm);

  int K_;
  std::int64_t T_;
  Rng rng_;
  std::int64_t chairs_rounds_;
  SicStage stage_ = SicStage::kMusicalChairs;
  Orthogonalizer orth_;
  std::optional<PlayerCounter> counter_;
  std::optional<ArmIndex> external_rank_;
  bool init_failed_ = false;
  bool desync_fault_ = false;
  int m_hat_ = 1;
  int rank_ = 1;
  Round stage_start_ = 0;
  SicPhaseLayout layout_;
  std::vector<ArmIndex> active_;
  std::vector<double> phase_sums_;         // by active position
  std::vector<std::int64_t> own_stats_;    // by active position
  std::vector<std::int64_t> received_;     // by active position, this phase
  std::int64_t receive_buffer_ = 0;
  std::vector<SicEstimate> estimates_;     // by arm
  int estimates_phase_ = 0;
  std::int64_t pulls_per_arm_ = 0;
  std::optional<ArmIndex> fixed_;
  std::optional<CommSlot> slot_;
  ArmIndex last_arm_ = 1;
};

// ---------------------------------------------------------------------------

/// Genie defender that always pulls one arm.
class PinnedDefender final : public Player {
 public:
  explicit PinnedDefender(ArmIndex arm) : arm_(arm) {}
  Action act(Round) override { return Action::pull(arm_); }
  void observe(Round, const Feedback&) override {}

 private:
  ArmIndex arm_;
};

}  // namespace mpmab
