#include "mpmab/metagame.hpp"

#include <algorithm>
#include <array>

namespace mpmab {

const char* to_string(MetaState s) {
  switch (s) {
    case MetaState::kExplore: return "EXPLORE";
    case MetaState::kDesync: return "DESYNC";
    case MetaState::kExploit: return "EXPLOIT";
  }
  return "?";
}

const char* to_string(MetaAction a) {
  switch (a) {
    case MetaAction::kNoCollision: return "N";
    case MetaAction::kAllRestart: return "C";
    case MetaAction::kSomeRestart: return "C'";
  }
  return "?";
}

MetaState meta_step(MetaState s, MetaAction a) {
  if (s == MetaState::kDesync) return MetaState::kExplore;
  switch (a) {
    case MetaAction::kNoCollision: return MetaState::kExploit;
    case MetaAction::kAllRestart: return MetaState::kExplore;
    case MetaAction::kSomeRestart: return MetaState::kDesync;
  }
  return MetaState::kExplore;
}

std::vector<MetaState> meta_trajectory(MetaState start, const std::vector<MetaAction>& actions, int horizon) {
  std::vector<MetaState> out{start};
  for (int i = 0; i + 1 < horizon; ++i) out.push_back(meta_step(out.back(), actions[static_cast<std::size_t>(i)]));
  return out;
}

namespace {

// Action sequences are encoded base 3, digit i = action taken after S_{i+1}.
// Only the first H-1 actions affect S_1..S_H, but all H are enumerated and
// charged, so the counted budget includes the action leaving S_H.
void check_start(MetaState start, int horizon, int budget, MetaBoundOptions options, std::uint64_t& sequences,
                 std::uint64_t& violations, std::optional<MetaCounterexample>& first) {
  std::uint64_t total = 1;
  for (int i = 0; i < horizon; ++i) total *= 3;
  std::vector<MetaAction> actions(static_cast<std::size_t>(horizon));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    int attacks = (options.charge_desync_start && start == MetaState::kDesync) ? 1 : 0;
    for (auto& a : actions) {
      a = kMetaActions[c % 3];
      c /= 3;
      if (a != MetaAction::kNoCollision) ++attacks;
    }
    ++sequences;
    if (attacks > budget) continue;
    int non_exploit = 0;
    MetaState s = start;
    for (int i = 0; i < horizon; ++i) {
      if (s != MetaState::kExploit) ++non_exploit;
      s = meta_step(s, actions[static_cast<std::size_t>(i)]);
    }
    if (non_exploit > 1 + 3 * attacks) {
      ++violations;
      if (!first) first = MetaCounterexample{start, actions, non_exploit, attacks};
    }
  }
}

}  // namespace

MetaBoundReport verify_bound_serial(int horizon, int budget, MetaBoundOptions options) {
  MetaBoundReport r;
  r.horizon = horizon;
  r.budget = budget;
  for (MetaState s : kMetaStates) check_start(s, horizon, budget, options, r.sequences, r.violations, r.first_violation);
  return r;
}

MetaBoundReport verify_bound(int horizon, int budget, MetaBoundOptions options) {
  std::array<std::uint64_t, 3> sequences{};
  std::array<std::uint64_t, 3> violations{};
  std::array<std::optional<MetaCounterexample>, 3> first{};
#pragma omp parallel for schedule(static)
  for (int i = 0; i < 3; ++i)
    check_start(kMetaStates[static_cast<std::size_t>(i)], horizon, budget, options, sequences[static_cast<std::size_t>(i)],
                violations[static_cast<std::size_t>(i)], first[static_cast<std::size_t>(i)]);
  MetaBoundReport r;
  r.horizon = horizon;
  r.budget = budget;
  for (std::size_t i = 0; i < 3; ++i) {
    r.sequences += sequences[i];
    r.violations += violations[i];
    if (!r.first_violation && first[i]) r.first_violation = first[i];
  }
  return r;
}

// ---------------------------------------------------------------------------

MetaState classify_state(const EpochRecord& e) {
  const auto n = std::count(e.exploring.begin(), e.exploring.end(), true);
  if (n == static_cast<std::ptrdiff_t>(e.exploring.size())) return MetaState::kExplore;
  if (n == 0) return MetaState::kExploit;
  return MetaState::kDesync;
}

MetaAction classify_action(const EpochRecord& e) {
  if (!e.adversarial_collision) return MetaAction::kNoCollision;
  const auto n = std::count(e.restart.begin(), e.restart.end(), true);
  if (n == static_cast<std::ptrdiff_t>(e.restart.size())) return MetaAction::kAllRestart;
  if (n == 0) return MetaAction::kNoCollision;
  return MetaAction::kSomeRestart;
}

AbstractRun abstract_run(const std::vector<EpochRecord>& epochs) {
  AbstractRun out;
  for (const auto& e : epochs) out.states.push_back(classify_state(e));
  for (std::size_t i = 0; i + 1 < epochs.size(); ++i) {
    const MetaAction a = classify_action(epochs[i]);
    out.actions.push_back(a);
    const MetaState predicted = meta_step(out.states[i], a);
    if (predicted != out.states[i + 1])
      out.mismatches.push_back({epochs[i + 1].epoch, predicted, out.states[i + 1], epochs[i].opt_agreement});
  }
  return out;
}

}  // namespace mpmab
