#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpmab/attack.hpp"
#include "mpmab/env.hpp"
#include "mpmab/metagame.hpp"
#include "mpmab/simulation.hpp"

namespace mpmab {

enum class Algorithm { kResync, kResync2, kMc, kSicMmab, kGenie };
enum class AttackKind { kNone, kMc, kSicMmab, kDesync, kLowerBound, kBurst, kUniform };

Algorithm parse_algorithm(const std::string& s);
AttackKind parse_attack(const std::string& s);
SensingMode parse_sensing(const std::string& s);
std::string to_string(Algorithm a);
std::string to_string(AttackKind a);
std::string to_string(SensingMode s);

struct ExperimentConfig {
  int K = 10;
  int N = 5;
  int M = 0;
  Round T = 100000;
  double delta_floor = 0.05;
  Algorithm algorithm = Algorithm::kResync;
  AttackKind attack = AttackKind::kNone;
  std::optional<std::int64_t> t0;        // hopping / exploration length override
  std::optional<SensingMode> sensing;    // defaults to what the algorithm needs
  std::uint64_t seed = 1;
  int runs = 20;
  int stride = 100;
  RewardKind reward_kind = RewardKind::kBernoulli;

  // Attack parameters.
  std::vector<Round> burst_starts{0, 50000};
  std::optional<Round> burst_length;     // defaults to the defenders' T0
  Round uniform_until = 5000;
  std::int64_t attack_budget = 10000;    // lower-bound attacker
  bool record_epochs = false;            // RESYNC only

  std::string out_csv;
  std::string out_svg;

  SensingMode effective_sensing() const;
  /// T0 the defenders will use.
  std::int64_t defender_t0() const;
  /// Throws ParameterError on inconsistent settings.
  void validate() const;
};

/// Applies `key = value` lines ('#' starts a comment) on top of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
/// Sets one key; shared by the file parser and CLI overrides.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Means uniform on [0,1], redrawn until distinct with gap >= floor.
BanditInstance sample_instance(const ExperimentConfig& config, Rng& rng);

struct RunResult {
  int run = 0;
  std::uint64_t seed = 0;
  BanditInstance instance;
  RunTrace trace;
  std::vector<std::int64_t> attacker_pulls;
  std::vector<EpochRecord> epochs;        // RESYNC with record_epochs
  std::vector<std::string> faults;        // exceptions and protocol faults
  bool completed = false;
};

/// Players of the configured algorithm / attacker for one run seed.
std::vector<std::unique_ptr<Player>> make_defenders(const ExperimentConfig& config, const BanditInstance& instance,
                                                    std::uint64_t seed);
std::vector<std::unique_ptr<Player>> make_attackers(const ExperimentConfig& config, std::uint64_t seed);

/// Builds the players of run `run` without stepping them.
Simulation make_simulation(const ExperimentConfig& config, int run);
/// Same, on a caller-chosen instance.
Simulation make_simulation(const ExperimentConfig& config, int run, BanditInstance instance);

/// Logs per-epoch phases, restarts and attack hits of a RESYNC team
/// (players 0..N-1) into `epochs`, which must outlive the simulation run.
void record_resync_epochs(Simulation& sim, int N, std::vector<EpochRecord>& epochs);
RunResult run_single(const ExperimentConfig& config, int run);

struct AggregateTrace {
  std::vector<double> mean;   // per round, over completed runs
  std::vector<double> stddev; // sample standard deviation
  std::vector<std::int64_t> final_attack_cost;  // per run
  int runs = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;
  AggregateTrace aggregate;
};

/// Runs in parallel across the batch.
ExperimentResult run_experiment(const ExperimentConfig& config);
/// Serial reference of run_experiment; produces identical results.
ExperimentResult run_experiment_serial(const ExperimentConfig& config);

AggregateTrace aggregate(const std::vector<RunResult>& runs);
AggregateTrace aggregate_serial(const std::vector<RunResult>& runs);

/// run,t,cum_regret,cum_attack_cost rows for t = stride, 2 stride, ... (1-based t).
void emit_csv(const std::vector<RunResult>& runs, int stride, const std::filesystem::path& path);
std::string format_csv(const std::vector<RunResult>& runs, int stride);

struct SvgSeries {
  std::string label;
  const AggregateTrace* trace;
};
void emit_svg(const std::vector<SvgSeries>& series, const std::string& title, int stride,
              const std::filesystem::path& path);
std::string format_svg(const std::vector<SvgSeries>& series, const std::string& title, int stride);

/// Configurations behind the four published experiments.
struct ReproCase {
  std::string name;
  std::vector<ExperimentConfig> configs;
  std::string note;
};
ReproCase repro_case(const std::string& figure);

}  // namespace mpmab
