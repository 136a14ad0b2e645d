#include "mpmab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mpmab {

std::int64_t mc_t0(int K, std::int64_t T, double min_gap) {
  if (!(min_gap > 0.0)) throw ParameterError("gap must be positive");
  const double k = K;
  const double t = static_cast<double>(T);
  const double a = 64.0 * k * std::log(4.0 * k * k * t) / (min_gap * min_gap);
  const double b = k * k * std::log(4.0 * t) / 0.02;
  return static_cast<std::int64_t>(std::ceil(std::max(a, b)));
}

// ---------------------------------------------------------------------------

McDefender::McDefender(int K, int N, std::int64_t t0, Rng rng)
    : K_(K),
      N_(N),
      t0_(t0),
      rng_(std::move(rng)),
      obs_(static_cast<std::size_t>(K), 0),
      sums_(static_cast<std::size_t>(K), 0.0) {
  if (K < 1 || N < 1 || N > K) throw ParameterError("MC needs 1 <= N <= K");
}

Action McDefender::act(Round t) {
  if (phase_ == McPhase::kExplore && t >= t0_) {
    // Unobserved arms score 0.
    std::vector<double> means(static_cast<std::size_t>(K_), 0.0);
    for (std::size_t i = 0; i < means.size(); ++i)
      if (obs_[i] > 0) means[i] = sums_[i] / static_cast<double>(obs_[i]);
    top_ = top_arms(means, N_);
    phase_ = McPhase::kMusicalChairs;
  }
  switch (phase_) {
    case McPhase::kExplore:
      last_arm_ = uniform_arm(rng_, K_);
      break;
    case McPhase::kMusicalChairs:
      last_arm_ = top_[static_cast<std::size_t>(uniform_arm(rng_, N_) - 1)];
      break;
    case McPhase::kCommitted:
      last_arm_ = *committed_;
      break;
  }
  return Action::pull(last_arm_);
}

void McDefender::observe(Round, const Feedback& feedback) {
  if (feedback.collision) return;
  if (phase_ == McPhase::kExplore) {
    obs_[static_cast<std::size_t>(last_arm_ - 1)] += 1;
    sums_[static_cast<std::size_t>(last_arm_ - 1)] += feedback.reward;
  } else if (phase_ == McPhase::kMusicalChairs) {
    committed_ = last_arm_;
    phase_ = McPhase::kCommitted;
  }
}

// ---------------------------------------------------------------------------

std::vector<ArmIndex> send_pulls(ArmIndex receiver_arm, std::int64_t statistic, int phase, ArmIndex own_arm) {
  if (statistic < 0 || statistic > max_statistic(phase))
    throw ParameterError("statistic " + std::to_string(statistic) + " does not fit in " + std::to_string(phase + 1) +
                         " bits");
  std::vector<ArmIndex> pulls;
  for (int b = 0; b <= phase; ++b) pulls.push_back((statistic >> b) & 1 ? receiver_arm : own_arm);
  return pulls;
}

std::int64_t quantize_statistic(double mean, int phase) {
  const std::int64_t top = max_statistic(phase);
  const auto q = static_cast<std::int64_t>(std::llround(static_cast<double>(top) * mean));
  return std::clamp<std::int64_t>(q, 0, top);
}

double confidence_width(std::int64_t T, std::int64_t pulls) {
  return 3.0 * std::sqrt(std::log(static_cast<double>(T)) / (2.0 * static_cast<double>(pulls)));
}

CommSlot comm_slot(const SicPhaseLayout& layout, std::int64_t offset) {
  const std::int64_t per_arm = layout.block_length();
  const std::int64_t per_pair = per_arm * layout.arms;
  const std::int64_t per_sender = per_pair * (layout.players - 1);
  CommSlot s{};
  s.sender = static_cast<int>(offset / per_sender) + 1;
  offset %= per_sender;
  s.receiver = static_cast<int>(offset / per_pair) + 1;
  if (s.receiver >= s.sender) ++s.receiver;
  offset %= per_pair;
  s.arm_pos = static_cast<int>(offset / per_arm) + 1;
  s.bit = static_cast<int>(offset % per_arm);
  return s;
}

SicMmabDefender::SicMmabDefender(int K, std::int64_t T, Rng rng)
    : K_(K),
      T_(T),
      rng_(std::move(rng)),
      chairs_rounds_(orthogonalization_rounds(K, T)),
      orth_(K),
      estimates_(static_cast<std::size_t>(K)) {
  if (K < 1 || T < 1) throw ParameterError("SIC-MMAB needs K >= 1 and T >= 1");
}

ArmIndex SicMmabDefender::active_arm(std::int64_t position) {
  const int kp = static_cast<int>(active_.size());
  if (position < 1 || position > kp) {
    desync_fault_ = true;
    position = wrap_index(position, kp);
  }
  return active_[static_cast<std::size_t>(position - 1)];
}

void SicMmabDefender::fix(ArmIndex arm) {
  fixed_ = arm;
  stage_ = SicStage::kFixed;
}

void SicMmabDefender::start_phase(Round t, int phase) {
  layout_.phase = phase;
  layout_.arms = static_cast<int>(active_.size());
  stage_ = SicStage::kExploration;
  stage_start_ = t;
  phase_sums_.assign(active_.size(), 0.0);
  if (rank_ > layout_.arms || layout_.players > layout_.arms) desync_fault_ = true;
}

void SicMmabDefender::finish_communication(Round t) {
  const int kp = layout_.arms;
  const int mp = layout_.players;
  const std::int64_t top = max_statistic(layout_.phase);
  for (int pos = 1; pos <= kp; ++pos) {
    auto& e = estimates_[static_cast<std::size_t>(active_[static_cast<std::size_t>(pos - 1)] - 1)];
    e.num += own_stats_[static_cast<std::size_t>(pos - 1)] + received_[static_cast<std::size_t>(pos - 1)];
    e.den += static_cast<std::int64_t>(mp) * top;
  }
  pulls_per_arm_ += static_cast<std::int64_t>(mp) << layout_.phase;
  estimates_phase_ = layout_.phase;

  const double b = confidence_width(T_, pulls_per_arm_);
  std::vector<ArmIndex> accepted;
  std::vector<ArmIndex> rejected;
  for (ArmIndex k : active_) {
    const double mk = estimates_[static_cast<std::size_t>(k - 1)].value();
    int beats = 0;
    int beaten_by = 0;
    for (ArmIndex m : active_) {
      if (m == k) continue;
      const double mm = estimates_[static_cast<std::size_t>(m - 1)].value();
      if (mk - b >= mm + b) ++beats;
      if (mm - b >= mk + b) ++beaten_by;
    }
    if (beats >= kp - mp)
      accepted.push_back(k);
    else if (beaten_by >= mp)
      rejected.push_back(k);
  }
  std::sort(accepted.begin(), accepted.end());

  const int remaining = mp - static_cast<int>(accepted.size());
  if (rank_ > remaining) {
    const auto idx = static_cast<std::size_t>(std::min<int>(rank_ - std::max(remaining, 0), static_cast<int>(accepted.size())));
    fix(accepted.empty() ? active_.front() : accepted[idx - 1]);
    return;
  }
  std::erase_if(active_, [&](ArmIndex k) {
    return std::find(accepted.begin(), accepted.end(), k) != accepted.end() ||
           std::find(rejected.begin(), rejected.end(), k) != rejected.end();
  });
  if (active_.empty()) {
    desync_fault_ = true;
    fix(accepted.empty() ? 1 : accepted.back());
    return;
  }
  layout_.players = remaining;
  start_phase(t, layout_.phase + 1);
}

Action SicMmabDefender::act(Round t) {
  for (;;) {
    if (stage_ == SicStage::kMusicalChairs && t >= chairs_rounds_) {
      external_rank_ = orth_.rank();
      if (!external_rank_) {
        init_failed_ = true;
        external_rank_ = last_arm_;
      }
      counter_.emplace(*external_rank_, K_);
      stage_ = SicStage::kEstimatePlayers;
      stage_start_ = t;
      continue;
    }
    if (stage_ == SicStage::kEstimatePlayers && t - stage_start_ >= 2LL * K_) {
      m_hat_ = counter_->count();
      rank_ = counter_->rank();
      if (m_hat_ > K_) desync_fault_ = true;
      active_.resize(static_cast<std::size_t>(K_));
      std::iota(active_.begin(), active_.end(), 1);
      layout_.players = m_hat_;
      start_phase(t, 1);
      continue;
    }
    if (stage_ == SicStage::kExploration && t - stage_start_ >= layout_.exploration_length()) {
      own_stats_.resize(active_.size());
      for (std::size_t i = 0; i < active_.size(); ++i)
        own_stats_[i] = quantize_statistic(phase_sums_[i] / static_cast<double>(std::int64_t{1} << layout_.phase),
                                           layout_.phase);
      received_.assign(active_.size(), 0);
      receive_buffer_ = 0;
      stage_ = SicStage::kCommunication;
      stage_start_ = t;
      continue;
    }
    if (stage_ == SicStage::kCommunication && t - stage_start_ >= layout_.communication_length()) {
      finish_communication(t);
      continue;
    }
    break;
  }

  slot_.reset();
  switch (stage_) {
    case SicStage::kMusicalChairs:
      last_arm_ = orth_.next(rng_);
      break;
    case SicStage::kEstimatePlayers:
      last_arm_ = counter_->arm(t - stage_start_ + 1);
      break;
    case SicStage::kExploration:
      last_arm_ = active_arm(wrap_index(rank_ + (t - stage_start_) + 1, layout_.arms));
      break;
    case SicStage::kCommunication: {
      const CommSlot s = comm_slot(layout_, t - stage_start_);
      slot_ = s;
      if (s.sender == rank_) {
        const std::int64_t stat = own_stats_[static_cast<std::size_t>(s.arm_pos - 1)];
        last_arm_ = active_arm((stat >> s.bit) & 1 ? s.receiver : rank_);
      } else {
        last_arm_ = active_arm(rank_);
      }
      break;
    }
    case SicStage::kFixed:
      last_arm_ = *fixed_;
      break;
  }
  return Action::pull(last_arm_);
}

void SicMmabDefender::observe(Round t, const Feedback& feedback) {
  switch (stage_) {
    case SicStage::kMusicalChairs:
      orth_.observe(feedback.collision);
      break;
    case SicStage::kEstimatePlayers:
      counter_->observe(t - stage_start_ + 1, feedback.collision);
      break;
    case SicStage::kExploration: {
      const auto pos = static_cast<std::size_t>(wrap_index(rank_ + (t - stage_start_) + 1, layout_.arms) - 1);
      phase_sums_[pos] += feedback.reward;
      break;
    }
    case SicStage::kCommunication:
      if (slot_ && slot_->receiver == rank_) {
        if (feedback.collision) receive_buffer_ |= std::int64_t{1} << slot_->bit;
        if (slot_->bit == layout_.phase) {
          received_[static_cast<std::size_t>(slot_->arm_pos - 1)] += receive_buffer_;
          receive_buffer_ = 0;
        }
      }
      break;
    case SicStage::kFixed:
      break;
  }
}

}  // namespace mpmab
