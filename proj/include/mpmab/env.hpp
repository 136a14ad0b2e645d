#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mpmab/rng.hpp"
#include "mpmab/types.hpp"

namespace mpmab {

enum class RewardKind { kBernoulli, kClippedGaussian };

/// Ground-truth bandit game: arm means plus the player population.
struct BanditInstance {
  std::vector<double> means;  // means[k-1] is the mean of arm k
  int defenders = 1;          // N
  int attackers = 0;          // M
  Round horizon = 1;          // T
  RewardKind reward_kind = RewardKind::kBernoulli;
  double reward_sigma = 0.1;  // only used by kClippedGaussian

  int arms() const { return static_cast<int>(means.size()); }
  int players() const { return defenders + attackers; }
  double mean(ArmIndex arm) const { return means[static_cast<std::size_t>(arm - 1)]; }

  /// Means sorted in decreasing order.
  std::vector<double> sorted_means() const;
  /// mu_(1) + ... + mu_(N).
  double optimal_reward() const;
  /// mu_(N) - mu_(N+1); +infinity when N == K.
  double gap() const;
  /// Arms holding the N largest means, ascending by index.
  std::vector<ArmIndex> optimal_arms() const;

  /// Throws ParameterError if the instance breaks the model assumptions.
  void validate() const;
};

/// Per-round cumulative series of one run.
struct RunTrace {
  std::vector<double> cum_regret;           // after round t+1
  std::vector<std::int64_t> cum_attack_cost;
  std::vector<double> cum_reward;           // realized, informational only

  std::size_t rounds() const { return cum_regret.size(); }
  double final_regret() const { return cum_regret.empty() ? 0.0 : cum_regret.back(); }
  std::int64_t final_attack_cost() const { return cum_attack_cost.empty() ? 0 : cum_attack_cost.back(); }
};

/// Resolves one round. `actions[p]` is player p's action; players
/// 0..N-1 are defenders, N..N+M-1 attackers. Quiet players get a
/// default Feedback which the caller must not deliver.
std::vector<Feedback> resolve_round(std::span<const Action> actions, const BanditInstance& instance,
                                    SensingMode sensing, Rng& env_rng);

/// Same as resolve_round, with the per-arm reward draws supplied by the
/// caller (`draws[k-1]` is X_k for this round).
std::vector<Feedback> resolve_round_with_draws(std::span<const Action> actions, const BanditInstance& instance,
                                               SensingMode sensing, std::span<const double> draws);

/// Draws X_k(t) for every arm. Always consumes the same amount of the
/// stream regardless of which arms are pulled.
std::vector<double> sample_rewards(const BanditInstance& instance, Rng& env_rng);

/// Pseudo-regret of one round, computed from the true means.
double accrue_regret(std::span<const Action> actions, const BanditInstance& instance);

/// 1 iff some defender and some attacker pulled the same arm.
int accrue_attack_cost(std::span<const Action> actions, int defenders);

}  // namespace mpmab
