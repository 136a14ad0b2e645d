#include "mpmab/simulation.hpp"

namespace mpmab {

Simulation::Simulation(BanditInstance instance, SensingMode sensing, std::vector<std::unique_ptr<Player>> defenders,
                       std::vector<std::unique_ptr<Player>> attackers, Rng env_rng)
    : instance_(std::move(instance)), sensing_(sensing), env_rng_(std::move(env_rng)) {
  instance_.defenders = static_cast<int>(defenders.size());
  instance_.attackers = static_cast<int>(attackers.size());
  instance_.validate();
  players_.reserve(defenders.size() + attackers.size());
  for (auto& p : defenders) players_.push_back(std::move(p));
  for (auto& p : attackers) players_.push_back(std::move(p));
  const auto reserve = static_cast<std::size_t>(std::max<Round>(instance_.horizon, 0));
  trace_.cum_regret.reserve(reserve);
  trace_.cum_attack_cost.reserve(reserve);
  trace_.cum_reward.reserve(reserve);
}

const RoundRecord& Simulation::step() {
  last_.t = t_;
  last_.actions.clear();
  for (auto& p : players_) last_.actions.push_back(p->act(t_));

  last_.feedback = resolve_round(last_.actions, instance_, sensing_, env_rng_);
  last_.regret = accrue_regret(last_.actions, instance_);
  last_.attack_cost = accrue_attack_cost(last_.actions, instance_.defenders);

  double reward = 0.0;
  for (std::size_t p = 0; p < players_.size(); ++p) {
    if (!last_.actions[p].is_pull()) continue;
    players_[p]->observe(t_, last_.feedback[p]);
    if (static_cast<int>(p) < instance_.defenders) reward += last_.feedback[p].reward;
  }

  const double prev_regret = trace_.cum_regret.empty() ? 0.0 : trace_.cum_regret.back();
  const std::int64_t prev_cost = trace_.cum_attack_cost.empty() ? 0 : trace_.cum_attack_cost.back();
  const double prev_reward = trace_.cum_reward.empty() ? 0.0 : trace_.cum_reward.back();
  trace_.cum_regret.push_back(prev_regret + last_.regret);
  trace_.cum_attack_cost.push_back(prev_cost + last_.attack_cost);
  trace_.cum_reward.push_back(prev_reward + reward);

  for (auto& obs : observers_) obs(last_);
  ++t_;
  return last_;
}

void Simulation::run(Round horizon) {
  while (t_ < horizon) step();
}

}  // namespace mpmab
