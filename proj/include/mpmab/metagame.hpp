#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mpmab {

enum class MetaState { kExplore, kDesync, kExploit };
enum class MetaAction { kNoCollision, kAllRestart, kSomeRestart };  // N, C, C'

inline constexpr std::array<MetaState, 3> kMetaStates{MetaState::kExplore, MetaState::kDesync, MetaState::kExploit};
inline constexpr std::array<MetaAction, 3> kMetaActions{MetaAction::kNoCollision, MetaAction::kAllRestart,
                                                        MetaAction::kSomeRestart};

const char* to_string(MetaState s);
const char* to_string(MetaAction a);

/// Epoch-level transition. DESYNC goes to EXPLORE under every action.
MetaState meta_step(MetaState s, MetaAction a);

struct MetaCounterexample {
  MetaState start;
  std::vector<MetaAction> actions;
  int non_exploit = 0;
  int attacks = 0;
};

struct MetaBoundReport {
  int horizon = 0;
  int budget = 0;
  std::uint64_t sequences = 0;   // (start, action sequence) pairs checked
  std::uint64_t violations = 0;
  std::optional<MetaCounterexample> first_violation;
  bool ok() const { return violations == 0; }
};

/// How the non-EXPLOIT count is charged.
struct MetaBoundOptions {
  /// Counted states are S_1..S_H (the start state and H-1 successors).
  /// When set, a DESYNC start state is treated as the product of one
  /// C' that happened before the window and is charged to the budget.
  bool charge_desync_start = false;
};

/// Enumerates all 3 * 3^H (start, actions) pairs and checks
/// #{t : S_t != EXPLOIT} <= 1 + 3 c' for every sequence with c' <= budget
/// attack actions. Runs start states in parallel.
MetaBoundReport verify_bound(int horizon, int budget, MetaBoundOptions options = {});
/// Single-threaded reference of verify_bound.
MetaBoundReport verify_bound_serial(int horizon, int budget, MetaBoundOptions options = {});

/// States visited S_1..S_H from `start` under `actions` (S_1 = start).
std::vector<MetaState> meta_trajectory(MetaState start, const std::vector<MetaAction>& actions, int horizon);

// ---------------------------------------------------------------------------
// Abstraction of a simulated RESYNC run.

struct EpochRecord {
  std::int64_t epoch = 0;
  std::vector<bool> exploring;     // per defender phase during the epoch
  std::vector<bool> restart;       // per defender Restart at the end of the epoch
  bool adversarial_collision = false;  // some defender shared an arm with an attacker
  bool opt_agreement = true;       // all defenders held the same Opt list
  bool complete = true;            // false for a horizon-truncated final epoch
};

MetaState classify_state(const EpochRecord& e);
/// N if no defender met an attacker; otherwise C if every defender
/// restarts, C' if some do, N if none do.
MetaAction classify_action(const EpochRecord& e);

struct ConformanceMismatch {
  std::int64_t epoch;
  MetaState predicted;
  MetaState observed;
  bool opt_agreement;
};

struct AbstractRun {
  std::vector<MetaState> states;
  std::vector<MetaAction> actions;  // one per complete epoch that has a successor
  std::vector<ConformanceMismatch> mismatches;
  bool conforms() const { return mismatches.empty(); }
};

/// Maps epochs to meta states/actions and replays meta_step against the
/// observed state sequence.
AbstractRun abstract_run(const std::vector<EpochRecord>& epochs);

}  // namespace mpmab
