#include "mpmab/defense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mpmab {

namespace {

std::int64_t hopping_length(int K, std::int64_t T, double delta, int constant) {
  if (!(delta > 0.0)) throw ParameterError("gap must be positive, got " + std::to_string(delta));
  if (K < 1 || T < 1) throw ParameterError("need K >= 1 and T >= 1");
  const double k = static_cast<double>(K);
  const double inner = std::ceil(std::log(2.0 * k * k * static_cast<double>(T)) / (delta * delta));
  return static_cast<std::int64_t>(constant) * K * static_cast<std::int64_t>(inner);
}

}  // namespace

std::int64_t resync_t0(int K, std::int64_t T, double delta, std::optional<std::int64_t> override_rounds) {
  if (override_rounds) return *override_rounds;
  return hopping_length(K, T, delta, 8);
}

std::int64_t resync2_t0(int K, std::int64_t T, double delta, std::optional<std::int64_t> override_rounds) {
  if (override_rounds) return *override_rounds;
  return hopping_length(K, T, delta, 16);
}

std::int64_t orthogonalization_rounds(int K, std::int64_t T) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(K) * std::log(static_cast<double>(T))));
}

std::vector<ArmIndex> top_arms(std::span<const double> scores, int N) {
  const int K = static_cast<int>(scores.size());
  if (N < 0 || N > K) throw ParameterError("cannot pick " + std::to_string(N) + " of " + std::to_string(K) + " arms");
  std::vector<ArmIndex> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](ArmIndex a, ArmIndex b) {
    return scores[static_cast<std::size_t>(a - 1)] > scores[static_cast<std::size_t>(b - 1)];
  });
  order.resize(static_cast<std::size_t>(N));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<ArmIndex> build_opt(std::span<const std::int64_t> observations, std::span<const double> reward_sums,
                                int N) {
  std::vector<double> means(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (observations[i] <= 0) throw ProtocolError("arm " + std::to_string(i + 1) + " has no observations");
    means[i] = reward_sums[i] / static_cast<double>(observations[i]);
  }
  return top_arms(means, N);
}

ArmIndex counting_arm(int external_rank, int K, std::int64_t step) {
  if (step <= 2LL * external_rank) return external_rank;
  return wrap_index(step - external_rank, K);
}

// ---------------------------------------------------------------------------

ResyncDefender::ResyncDefender(ResyncParams params)
    : params_(params),
      obs_(static_cast<std::size_t>(params.K), 0),
      sums_(static_cast<std::size_t>(params.K), 0.0) {
  if (params_.K < 1 || params_.N < 1 || params_.N > params_.K) throw ParameterError("RESYNC needs 1 <= N <= K");
  if (params_.rank < 1 || params_.rank > params_.N) throw ParameterError("rank must lie in [1, N]");
  if (params_.t0 < 1) throw ParameterError("T0 must be positive");
}

ExplorationStage ResyncDefender::stage_at(Round t) const {
  const std::int64_t n = params_.N;
  const std::int64_t offset = t % params_.epoch_length();
  if (offset < params_.t0) return ExplorationStage::kSequentialHopping;
  if (offset < params_.t0 + n * n) return ExplorationStage::kSensing;
  if (offset < params_.t0 + 2 * n * n) return ExplorationStage::kIntraCommunication;
  return ExplorationStage::kInterCommunication;
}

void ResyncDefender::force_epoch_state(std::int64_t epoch, EpochPhase phase, std::vector<ArmIndex> opt) {
  epoch_ = epoch;
  phase_ = phase;
  opt_ = std::move(opt);
  restart_ = false;
  sufficient_ = !opt_.empty();
  hopping_done_ = false;
}

void ResyncDefender::seed_observations(std::vector<std::int64_t> obs, std::vector<double> sums) {
  obs_ = std::move(obs);
  sums_ = std::move(sums);
}

void ResyncDefender::begin_epoch(std::int64_t epoch) {
  epoch_ = epoch;
  phase_ = restart_ ? EpochPhase::kExploration : EpochPhase::kExploitation;
  restart_ = false;
  hopping_done_ = false;
  if (phase_ == EpochPhase::kExploration) sufficient_ = false;
}

void ResyncDefender::finish_hopping() {
  hopping_done_ = true;
  const std::int64_t k = params_.K;
  sufficient_ = std::all_of(obs_.begin(), obs_.end(), [&](std::int64_t o) { return o * k >= params_.t0; });
  if (sufficient_)
    opt_ = build_opt(obs_, sums_, params_.N);
  else
    restart_ = true;
}

Action ResyncDefender::act(Round t) {
  if (awaiting_) throw ProtocolError("RESYNC defender asked to act before receiving feedback for its last pull");
  const std::int64_t tb = params_.epoch_length();
  if (t / tb != epoch_) begin_epoch(t / tb);
  const std::int64_t offset = t % tb;
  const Action a = phase_ == EpochPhase::kExploration ? exploration_action(t, offset) : exploitation_action(t, offset);
  awaiting_ = t;
  last_arm_ = a.arm();
  return a;
}

Action ResyncDefender::exploration_action(Round t, std::int64_t offset) {
  const int K = params_.K;
  const std::int64_t n = params_.N;
  const int j = params_.rank;
  if (offset < params_.t0) return Action::pull(wrap_index(t + j, K));
  if (!hopping_done_) finish_hopping();

  const ArmIndex head = sufficient_ ? opt_.front() : 1;
  std::int64_t r = offset - params_.t0 + 1;  // 1-based inside the sub-phase
  if (r <= n * n) {
    const std::int64_t i = (r + n - 1) / n;
    if (!sufficient_) return Action::pull(1);
    return Action::pull(i == j ? head : wrap_index(head + 1, K));
  }
  r -= n * n;
  if (r <= n * n) {
    const std::int64_t i = (r + n - 1) / n;
    const int k = static_cast<int>((r - 1) % n) + 1;
    if (i == j) return Action::pull(restart_ ? k : j);
    return Action::pull(j);
  }
  return Action::pull(head);
}

Action ResyncDefender::exploitation_action(Round t, std::int64_t /*offset*/) const {
  if (opt_.empty()) throw ProtocolError("exploitation without an optimal arm list");
  return Action::pull(opt_[static_cast<std::size_t>(wrap_index(t + params_.rank, params_.N) - 1)]);
}

void ResyncDefender::observe(Round t, const Feedback& feedback) {
  if (!awaiting_ || *awaiting_ != t) throw ProtocolError("feedback for a round the defender did not pull in");
  awaiting_.reset();
  const std::int64_t n = params_.N;
  const std::int64_t offset = t % params_.epoch_length();

  if (phase_ == EpochPhase::kExploitation) {
    if (feedback.collision && offset >= params_.t0 + 2 * n * n) restart_ = true;
    return;
  }

  switch (stage_at(t)) {
    case ExplorationStage::kSequentialHopping:
      if (feedback.collision) {
        restart_ = true;
      } else {
        obs_[static_cast<std::size_t>(last_arm_ - 1)] += 1;
        sums_[static_cast<std::size_t>(last_arm_ - 1)] += feedback.reward;
      }
      // The epoch may end right after hopping when N² + N rounds are cut off
      // by the horizon; decide sufficiency eagerly on the last hop.
      if (offset + 1 == params_.t0) finish_hopping();
      break;
    case ExplorationStage::kSensing: {
      const std::int64_t r = offset - params_.t0 + 1;
      if (sufficient_ && (r + n - 1) / n == params_.rank && feedback.collision) restart_ = true;
      break;
    }
    case ExplorationStage::kIntraCommunication: {
      const std::int64_t r = offset - params_.t0 - n * n + 1;
      if ((r + n - 1) / n != params_.rank && feedback.collision) restart_ = true;
      break;
    }
    case ExplorationStage::kInterCommunication:
      break;
  }
}

// ---------------------------------------------------------------------------

Resync2Defender::Resync2Defender(Resync2Params params, Rng rng)
    : params_(params),
      rng_(std::move(rng)),
      orth_rounds_(orthogonalization_rounds(params.K, params.horizon)),
      orth_(params.K),
      obs_(static_cast<std::size_t>(params.K), 0),
      sums_(static_cast<std::size_t>(params.K), 0.0) {
  if (params_.K < 1) throw ParameterError("RESYNC2 needs K >= 1");
  if (params_.t0 < 1) throw ParameterError("T0 must be positive");
}

std::int64_t Resync2Defender::clean_epochs_needed() const {
  const std::int64_t len = 2LL * params_.K;
  return (params_.t0 + len - 1) / len;
}

void Resync2Defender::enter_counting(Round t) {
  stage_ = Resync2Stage::kCounting;
  external_rank_ = orth_.rank();
  if (!external_rank_) {
    init_failed_ = true;
    external_rank_ = last_arm_;
  }
  counter_.emplace(*external_rank_, params_.K);
  counting_start_ = t;
}

void Resync2Defender::enter_exploration(Round t) {
  n_hat_ = std::min(counter_->count(), params_.K);
  rank_ = std::min(counter_->rank(), n_hat_);
  stage_ = Resync2Stage::kExploration;
  exploration_start_ = t;
  epoch_start_ = t;
  restart_ = false;
}

void Resync2Defender::close_epoch(Round t) {
  ++exploration_epochs_;
  if (!restart_) ++clean_epochs_;
  restart_ = false;
  epoch_start_ = t;
  if (clean_epochs_ >= clean_epochs_needed()) {
    opt_ = build_opt(obs_, sums_, n_hat_);
    stage_ = Resync2Stage::kExploitation;
    exploitation_start_ = t;
  }
}

Action Resync2Defender::act(Round t) {
  if (awaiting_) throw ProtocolError("RESYNC2 defender asked to act before receiving feedback for its last pull");
  if (stage_ == Resync2Stage::kOrthogonalization && t >= orth_rounds_) enter_counting(t);
  if (stage_ == Resync2Stage::kCounting && t - counting_start_ >= 2LL * params_.K) enter_exploration(t);
  if (stage_ == Resync2Stage::kExploration && t - epoch_start_ >= 2LL * params_.K) close_epoch(t);

  ArmIndex arm = 1;
  switch (stage_) {
    case Resync2Stage::kOrthogonalization:
      arm = orth_.next(rng_);
      break;
    case Resync2Stage::kCounting:
      arm = counter_->arm(t - counting_start_ + 1);
      break;
    case Resync2Stage::kExploration: {
      const bool second_half = t - epoch_start_ >= params_.K;
      arm = second_half && restart_ ? 1 : wrap_index(t + rank_, params_.K);
      break;
    }
    case Resync2Stage::kExploitation:
      arm = opt_[static_cast<std::size_t>(wrap_index(t + rank_, n_hat_) - 1)];
      break;
  }
  awaiting_ = t;
  last_arm_ = arm;
  return Action::pull(arm);
}

void Resync2Defender::observe(Round t, const Feedback& feedback) {
  if (!awaiting_ || *awaiting_ != t) throw ProtocolError("feedback for a round the defender did not pull in");
  awaiting_.reset();
  switch (stage_) {
    case Resync2Stage::kOrthogonalization:
      orth_.observe(feedback.collision);
      break;
    case Resync2Stage::kCounting:
      counter_->observe(t - counting_start_ + 1, feedback.defender_collision());
      break;
    case Resync2Stage::kExploration:
      if (t - epoch_start_ < params_.K) {
        if (feedback.collision) {
          restart_ = true;
        } else {
          obs_[static_cast<std::size_t>(last_arm_ - 1)] += 1;
          sums_[static_cast<std::size_t>(last_arm_ - 1)] += feedback.reward;
        }
      } else if (!restart_ && feedback.defender_collision()) {
        restart_ = true;
      }
      break;
    case Resync2Stage::kExploitation:
      break;
  }
}

}  // namespace mpmab
