#include "mpmab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mpmab {

McAttack::McAttack(int K, std::int64_t T, std::int64_t t0, Rng rng)
    : K_(K),
      t0_(t0),
      squat_rounds_(orthogonalization_rounds(K, T)),
      rng_(std::move(rng)),
      obs_(static_cast<std::size_t>(K), 0),
      sums_(static_cast<std::size_t>(K), 0.0) {}

Action McAttack::decide(Round t) {
  if (t < t0_) {
    last_arm_ = uniform_arm(rng_, K_);
    return Action::pull(last_arm_);
  }
  if (!best_) {
    std::vector<double> means(static_cast<std::size_t>(K_), 0.0);
    for (std::size_t i = 0; i < means.size(); ++i)
      if (obs_[i] > 0) means[i] = sums_[i] / static_cast<double>(obs_[i]);
    best_ = top_arms(means, 1).front();
  }
  if (t < t0_ + squat_rounds_) return Action::pull(*best_);
  return Action::none();
}

void McAttack::observe(Round t, const Feedback& f) {
  if (t >= t0_ || f.collision) return;
  obs_[static_cast<std::size_t>(last_arm_ - 1)] += 1;
  sums_[static_cast<std::size_t>(last_arm_ - 1)] += f.reward;
}

// ---------------------------------------------------------------------------

SicMmabAttack::SicMmabAttack(int K, std::int64_t T, Rng rng) : SicMmabAttack(K, T, uniform_arm(rng, K)) {}

SicMmabAttack::SicMmabAttack(int K, std::int64_t T, ArmIndex target_arm)
    : K_(K), T_(T), target_(target_arm), chairs_rounds_(orthogonalization_rounds(K, T)) {}

double SicMmabAttack::budget(int K, std::int64_t T) {
  return 21.0 * K * K * std::log(static_cast<double>(T));
}

bool SicMmabAttack::phase_is_last(int phase) const {
  // Pulls per arm after this phase: I (2^{p+1} - 2). The target accepts once
  // the 1/I gap clears twice the confidence width.
  const double s = static_cast<double>(players_) * static_cast<double>((std::int64_t{1} << (phase + 1)) - 2);
  return s >= 18.0 * players_ * players_ * std::log(static_cast<double>(T_));
}

Action SicMmabAttack::decide(Round t) {
  if (done_) return Action::none();
  if (t < chairs_rounds_) return Action::pull(1);
  const Round counting_start = chairs_rounds_;
  if (t < counting_start + 2LL * K_) {
    if (!counter_) counter_.emplace(1, K_);
    return Action::pull(counter_->arm(t - counting_start + 1));
  }
  if (phase_ == 0) {
    players_ = counter_->count();
    rank_ = counter_->rank();
    phase_ = 1;
    phase_start_ = t;
  }

  SicPhaseLayout layout{phase_, players_, K_};
  for (;;) {
    const std::int64_t end = layout.exploration_length() + layout.communication_length();
    if (t - phase_start_ < end) break;
    if (phase_is_last(phase_)) {
      done_ = true;
      return Action::none();
    }
    phase_start_ += end;
    layout.phase = ++phase_;
  }

  const std::int64_t offset = t - phase_start_;
  const int target_rank = players_;
  if (offset < layout.exploration_length()) return Action::pull(wrap_index(target_rank + offset + 1, K_));

  const CommSlot s = comm_slot(layout, offset - layout.exploration_length());
  if (s.sender == rank_) {
    const std::int64_t top = max_statistic(phase_);
    std::int64_t stat = top;
    if (s.receiver == target_rank && s.arm_pos != target_) stat = 0;
    return Action::pull((stat >> s.bit) & 1 ? s.receiver : rank_);
  }
  if (s.receiver == rank_) return Action::none();
  return Action::pull(wrap_index(s.receiver, K_));
}

void SicMmabAttack::observe(Round t, const Feedback& f) {
  const Round counting_start = chairs_rounds_;
  if (counter_ && t >= counting_start && t < counting_start + 2LL * K_)
    counter_->observe(t - counting_start + 1, f.collision);
}

// ---------------------------------------------------------------------------

SicMmabDesyncAttack::SicMmabDesyncAttack(int K, std::int64_t T)
    : K_(K), quiet_rounds_(orthogonalization_rounds(K, T)) {}

std::int64_t SicMmabDesyncAttack::budget(int K, std::int64_t T) { return 3LL * K + orthogonalization_rounds(K, T); }

Action SicMmabDesyncAttack::decide(Round t) {
  if (t < quiet_rounds_) return Action::none();
  if (!victim_) {
    last_arm_ = wrap_index(++hop_, K_);
    return Action::pull(last_arm_);
  }
  // Found at step d = victim: it sits on d through step 2d, then sweeps
  // d+1, d+2, ... until step 2K.
  const std::int64_t d = *victim_;
  ++follow_;
  if (follow_ <= d) return Action::pull(static_cast<ArmIndex>(d));
  if (follow_ <= d + 2LL * K_ - 2 * d) return Action::pull(wrap_index(d + (follow_ - d), K_));
  return Action::none();
}

void SicMmabDesyncAttack::observe(Round, const Feedback& f) {
  if (!victim_ && f.collision) victim_ = last_arm_;
}

// ---------------------------------------------------------------------------

Action BurstAttack::decide(Round t) {
  for (const auto& [begin, end] : windows_)
    if (t >= begin && t < end) return Action::pull(arm_);
  return Action::none();
}

std::vector<ArmIndex> choose_distinct_arms(int K, int M, Rng& rng) {
  if (M > K) throw ParameterError("cannot choose more distinct arms than exist");
  std::vector<ArmIndex> arms(static_cast<std::size_t>(K));
  std::iota(arms.begin(), arms.end(), 1);
  std::shuffle(arms.begin(), arms.end(), rng);
  arms.resize(static_cast<std::size_t>(M));
  return arms;
}

}  // namespace mpmab
