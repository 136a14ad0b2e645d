#include "mpmab/env.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace mpmab {

std::vector<double> BanditInstance::sorted_means() const {
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted;
}

double BanditInstance::optimal_reward() const {
  const auto sorted = sorted_means();
  return std::accumulate(sorted.begin(), sorted.begin() + std::min<std::ptrdiff_t>(defenders, arms()), 0.0);
}

double BanditInstance::gap() const {
  if (defenders >= arms()) return std::numeric_limits<double>::infinity();
  const auto sorted = sorted_means();
  return sorted[static_cast<std::size_t>(defenders - 1)] - sorted[static_cast<std::size_t>(defenders)];
}

std::vector<ArmIndex> BanditInstance::optimal_arms() const {
  std::vector<ArmIndex> order(means.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](ArmIndex a, ArmIndex b) { return mean(a) > mean(b); });
  order.resize(static_cast<std::size_t>(std::min(defenders, arms())));
  std::sort(order.begin(), order.end());
  return order;
}

void BanditInstance::validate() const {
  if (means.empty()) throw ParameterError("instance needs at least one arm");
  if (defenders < 1) throw ParameterError("instance needs at least one defender");
  if (attackers < 0) throw ParameterError("attacker count must be non-negative");
  if (defenders > arms()) throw ParameterError("need K >= N (K=" + std::to_string(arms()) +
                                               ", N=" + std::to_string(defenders) + ")");
  if (horizon < 0) throw ParameterError("horizon must be non-negative");
  for (double m : means)
    if (!(m >= 0.0 && m <= 1.0)) throw ParameterError("arm means must lie in [0,1]");
  auto sorted = sorted_means();
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("arm means must be pairwise distinct");
}

std::vector<double> sample_rewards(const BanditInstance& instance, Rng& env_rng) {
  std::vector<double> draws(instance.means.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < draws.size(); ++k) {
    const double mu = instance.means[k];
    if (instance.reward_kind == RewardKind::kBernoulli) {
      draws[k] = unit(env_rng) < mu ? 1.0 : 0.0;
    } else {
      std::normal_distribution<double> noise(mu, instance.reward_sigma);
      draws[k] = std::clamp(noise(env_rng), 0.0, 1.0);
    }
  }
  return draws;
}

namespace {

struct ArmLoad {
  int defenders = 0;
  int attackers = 0;
  int total() const { return defenders + attackers; }
};

std::vector<ArmLoad> count_pulls(std::span<const Action> actions, int K, int defenders) {
  std::vector<ArmLoad> load(static_cast<std::size_t>(K) + 1);
  for (std::size_t p = 0; p < actions.size(); ++p) {
    const Action& a = actions[p];
    const bool is_defender = static_cast<int>(p) < defenders;
    if (!a.is_pull()) {
      if (is_defender) throw InvalidActionError("defender " + std::to_string(p + 1) + " must pull an arm");
      continue;
    }
    if (a.arm() < 1 || a.arm() > K)
      throw InvalidActionError("player " + std::to_string(p + 1) + " pulled arm " + std::to_string(a.arm()) +
                               " outside [1, " + std::to_string(K) + "]");
    auto& slot = load[static_cast<std::size_t>(a.arm())];
    (is_defender ? slot.defenders : slot.attackers) += 1;
  }
  return load;
}

}  // namespace

std::vector<Feedback> resolve_round_with_draws(std::span<const Action> actions, const BanditInstance& instance,
                                               SensingMode sensing, std::span<const double> draws) {
  const auto load = count_pulls(actions, instance.arms(), instance.defenders);
  std::vector<Feedback> out(actions.size());
  for (std::size_t p = 0; p < actions.size(); ++p) {
    if (!actions[p].is_pull()) continue;
    const auto arm = static_cast<std::size_t>(actions[p].arm());
    const ArmLoad& l = load[arm];
    Feedback& fb = out[p];
    fb.collision = l.total() > 1;
    fb.reward = fb.collision ? 0.0 : draws[arm - 1];
    if (sensing == SensingMode::kDistinguishable) {
      fb.has_sources = true;
      fb.sources.defenders = l.defenders > 1;
      fb.sources.attackers = fb.collision && l.attackers >= 1;
    }
  }
  return out;
}

std::vector<Feedback> resolve_round(std::span<const Action> actions, const BanditInstance& instance,
                                    SensingMode sensing, Rng& env_rng) {
  const auto draws = sample_rewards(instance, env_rng);
  return resolve_round_with_draws(actions, instance, sensing, draws);
}

double accrue_regret(std::span<const Action> actions, const BanditInstance& instance) {
  const auto load = count_pulls(actions, instance.arms(), instance.defenders);
  double collected = 0.0;
  for (int p = 0; p < instance.defenders && p < static_cast<int>(actions.size()); ++p) {
    const ArmIndex arm = actions[static_cast<std::size_t>(p)].arm();
    if (load[static_cast<std::size_t>(arm)].total() == 1) collected += instance.mean(arm);
  }
  return instance.optimal_reward() - collected;
}

int accrue_attack_cost(std::span<const Action> actions, int defenders) {
  const auto n = static_cast<int>(actions.size());
  for (int a = defenders; a < n; ++a) {
    if (!actions[static_cast<std::size_t>(a)].is_pull()) continue;
    for (int d = 0; d < defenders && d < n; ++d)
      if (actions[static_cast<std::size_t>(d)] == actions[static_cast<std::size_t>(a)]) return 1;
  }
  return 0;
}

}  // namespace mpmab
