#include "mpmab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mpmab/baselines.hpp"
#include "mpmab/defense.hpp"

namespace mpmab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Accepts plain integers and integral scientific notation such as 1e5.
std::int64_t parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
    const double d = std::stod(value, &used);
    if (used == value.size() && std::floor(d) == d && std::abs(d) < 9e18) return static_cast<std::int64_t>(d);
  } catch (const std::exception&) {
  }
  throw ParameterError("'" + key + "' expects an integer, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used == value.size()) return d;
  } catch (const std::exception&) {
  }
  throw ParameterError("'" + key + "' expects a number, got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  const auto v = lower(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError("'" + key + "' expects true/false, got '" + value + "'");
}

int as_int(const std::string& key, std::int64_t v) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ParameterError("'" + key + "' out of range");
  return static_cast<int>(v);
}

}  // namespace

Algorithm parse_algorithm(const std::string& s) {
  const auto v = lower(s);
  if (v == "resync") return Algorithm::kResync;
  if (v == "resync2") return Algorithm::kResync2;
  if (v == "mc") return Algorithm::kMc;
  if (v == "sicmmab" || v == "sic-mmab") return Algorithm::kSicMmab;
  if (v == "genie" || v == "pinned") return Algorithm::kGenie;
  throw ParameterError("unknown algorithm '" + s + "'");
}

AttackKind parse_attack(const std::string& s) {
  const auto v = lower(s);
  if (v == "none" || v == "silent") return AttackKind::kNone;
  if (v == "mc" || v == "mc-attack") return AttackKind::kMc;
  if (v == "sicmmab" || v == "sicmmab-attack") return AttackKind::kSicMmab;
  if (v == "desync" || v == "sicmmab-desync") return AttackKind::kDesync;
  if (v == "lowerbound" || v == "lower-bound") return AttackKind::kLowerBound;
  if (v == "burst") return AttackKind::kBurst;
  if (v == "uniform") return AttackKind::kUniform;
  throw ParameterError("unknown attacker '" + s + "'");
}

SensingMode parse_sensing(const std::string& s) {
  const auto v = lower(s);
  if (v == "nd") return SensingMode::kNonDistinguishable;
  if (v == "d") return SensingMode::kDistinguishable;
  throw ParameterError("sensing must be 'nd' or 'd', got '" + s + "'");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kResync: return "resync";
    case Algorithm::kResync2: return "resync2";
    case Algorithm::kMc: return "mc";
    case Algorithm::kSicMmab: return "sicmmab";
    case Algorithm::kGenie: return "genie";
  }
  return "?";
}

std::string to_string(AttackKind a) {
  switch (a) {
    case AttackKind::kNone: return "none";
    case AttackKind::kMc: return "mc";
    case AttackKind::kSicMmab: return "sicmmab";
    case AttackKind::kDesync: return "desync";
    case AttackKind::kLowerBound: return "lowerbound";
    case AttackKind::kBurst: return "burst";
    case AttackKind::kUniform: return "uniform";
  }
  return "?";
}

std::string to_string(SensingMode s) { return s == SensingMode::kDistinguishable ? "d" : "nd"; }

SensingMode ExperimentConfig::effective_sensing() const {
  if (sensing) return *sensing;
  return algorithm == Algorithm::kResync2 ? SensingMode::kDistinguishable : SensingMode::kNonDistinguishable;
}

std::int64_t ExperimentConfig::defender_t0() const {
  switch (algorithm) {
    case Algorithm::kResync2: return resync2_t0(K, T, delta_floor, t0);
    case Algorithm::kMc: return t0 ? *t0 : mc_t0(K, T, delta_floor);
    default: return resync_t0(K, T, delta_floor, t0);
  }
}

void ExperimentConfig::validate() const {
  if (K < 1) throw ParameterError("K must be at least 1");
  if (N < 1 || N > K) throw ParameterError("N must lie in [1, K]");
  if (M < 0) throw ParameterError("M must be non-negative");
  if (T < 1) throw ParameterError("T must be at least 1");
  if (!(delta_floor >= 0.0 && delta_floor < 1.0)) throw ParameterError("delta_floor must lie in [0, 1)");
  if (runs < 1) throw ParameterError("runs must be at least 1");
  if (stride < 1) throw ParameterError("stride must be at least 1");
  if (t0 && *t0 < 1) throw ParameterError("t0 must be positive");
  if ((algorithm == Algorithm::kResync || algorithm == Algorithm::kResync2) && !t0 && !(delta_floor > 0.0))
    throw ParameterError("delta_floor must be positive when T0 is derived from it");

  const SensingMode s = effective_sensing();
  if (algorithm == Algorithm::kResync2 && s != SensingMode::kDistinguishable)
    throw ParameterError("resync2 requires distinguishable sensing (--sensing d)");
  if ((algorithm == Algorithm::kResync || algorithm == Algorithm::kMc || algorithm == Algorithm::kSicMmab) &&
      s != SensingMode::kNonDistinguishable)
    throw ParameterError(to_string(algorithm) + " runs under non-distinguishable sensing (--sensing nd)");

  if (attack != AttackKind::kNone && M < 1) throw ParameterError("attacker '" + to_string(attack) + "' needs M >= 1");
  if (attack == AttackKind::kBurst && M > K) throw ParameterError("burst team needs M <= K distinct arms");
  if (attack == AttackKind::kLowerBound && attack_budget < 0) throw ParameterError("attack_budget must be >= 0");
  if (burst_length && *burst_length < 0) throw ParameterError("burst_length must be >= 0");
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& value) {
  std::string key = lower(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "k") c.K = as_int(key, parse_integer(key, value));
  else if (key == "n") c.N = as_int(key, parse_integer(key, value));
  else if (key == "m") c.M = as_int(key, parse_integer(key, value));
  else if (key == "t") c.T = parse_integer(key, value);
  else if (key == "delta_floor") c.delta_floor = parse_real(key, value);
  else if (key == "algo" || key == "algorithm") c.algorithm = parse_algorithm(value);
  else if (key == "attacker" || key == "attack") c.attack = parse_attack(value);
  else if (key == "t0") c.t0 = parse_integer(key, value);
  else if (key == "sensing") c.sensing = parse_sensing(value);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_integer(key, value));
  else if (key == "runs") c.runs = as_int(key, parse_integer(key, value));
  else if (key == "stride") c.stride = as_int(key, parse_integer(key, value));
  else if (key == "reward") {
    const auto v = lower(value);
    if (v == "bernoulli") c.reward_kind = RewardKind::kBernoulli;
    else if (v == "gaussian") c.reward_kind = RewardKind::kClippedGaussian;
    else throw ParameterError("reward must be bernoulli or gaussian");
  } else if (key == "burst_starts") {
    c.burst_starts.clear();
    std::stringstream ss(value);
    for (std::string item; std::getline(ss, item, ',');)
      if (!trim(item).empty()) c.burst_starts.push_back(parse_integer(key, trim(item)));
  } else if (key == "burst_length") c.burst_length = parse_integer(key, value);
  else if (key == "uniform_until") c.uniform_until = parse_integer(key, value);
  else if (key == "attack_budget") c.attack_budget = parse_integer(key, value);
  else if (key == "record_epochs") c.record_epochs = parse_bool(key, value);
  else if (key == "out_csv") c.out_csv = value;
  else if (key == "out_svg") c.out_svg = value;
  else throw ParameterError("unknown config key '" + raw_key + "'");
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    try {
      apply_setting(base, key, value);
    } catch (const ParameterError& e) {
      throw ParameterError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

BanditInstance sample_instance(const ExperimentConfig& config, Rng& rng) {
  BanditInstance inst;
  inst.defenders = config.N;
  inst.attackers = config.M;
  inst.horizon = config.T;
  inst.reward_kind = config.reward_kind;
  inst.means.resize(static_cast<std::size_t>(config.K));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (auto& m : inst.means) m = unit(rng);
    auto sorted = inst.means;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
    if (inst.gap() >= config.delta_floor) return inst;
  }
  throw ParameterError("could not sample an instance with gap >= " + std::to_string(config.delta_floor) +
                       " after 10000 draws");
}

// ---------------------------------------------------------------------------

std::vector<std::unique_ptr<Player>> make_defenders(const ExperimentConfig& c, const BanditInstance& inst,
                                                    std::uint64_t seed) {
  std::vector<std::unique_ptr<Player>> out;
  const auto t0 = c.defender_t0();
  const auto optimal = inst.optimal_arms();
  for (int p = 0; p < c.N; ++p) {
    Rng rng = make_stream(seed, stream::player(static_cast<std::uint64_t>(p)));
    switch (c.algorithm) {
      case Algorithm::kResync:
        out.push_back(std::make_unique<ResyncDefender>(ResyncParams{c.K, c.N, p + 1, t0}));
        break;
      case Algorithm::kResync2:
        out.push_back(std::make_unique<Resync2Defender>(Resync2Params{c.K, c.T, t0}, rng));
        break;
      case Algorithm::kMc:
        out.push_back(std::make_unique<McDefender>(c.K, c.N, t0, rng));
        break;
      case Algorithm::kSicMmab:
        out.push_back(std::make_unique<SicMmabDefender>(c.K, c.T, rng));
        break;
      case Algorithm::kGenie:
        out.push_back(std::make_unique<PinnedDefender>(optimal[static_cast<std::size_t>(p)]));
        break;
    }
  }
  return out;
}

std::vector<std::unique_ptr<Player>> make_attackers(const ExperimentConfig& c, std::uint64_t seed) {
  std::vector<std::unique_ptr<Player>> out;
  std::vector<ArmIndex> burst_arms;
  std::vector<Window> windows;
  if (c.attack == AttackKind::kBurst) {
    Rng team = make_stream(seed, stream::kAttackTeam);
    burst_arms = choose_distinct_arms(c.K, c.M, team);
    const Round len = c.burst_length.value_or(c.defender_t0());
    for (Round s : c.burst_starts) windows.emplace_back(s, s + len);
  }
  for (int q = 0; q < c.M; ++q) {
    Rng rng = make_stream(seed, stream::player(static_cast<std::uint64_t>(c.N + q)));
    switch (c.attack) {
      case AttackKind::kNone:
        out.push_back(std::make_unique<SilentAttack>());
        break;
      case AttackKind::kMc:
        out.push_back(std::make_unique<McAttack>(c.K, c.T, c.defender_t0(), rng));
        break;
      case AttackKind::kSicMmab:
        out.push_back(std::make_unique<SicMmabAttack>(c.K, c.T, rng));
        break;
      case AttackKind::kDesync:
        out.push_back(std::make_unique<SicMmabDesyncAttack>(c.K, c.T));
        break;
      case AttackKind::kLowerBound:
        out.push_back(std::make_unique<LowerBoundAttack>(c.K, c.attack_budget, rng));
        break;
      case AttackKind::kBurst:
        out.push_back(std::make_unique<BurstAttack>(burst_arms[static_cast<std::size_t>(q)], windows));
        break;
      case AttackKind::kUniform:
        out.push_back(std::make_unique<UniformAttack>(c.K, c.uniform_until, rng));
        break;
    }
  }
  return out;
}

void record_resync_epochs(Simulation& sim, int N, std::vector<EpochRecord>& epochs) {
  std::vector<const ResyncDefender*> team;
  for (int p = 0; p < N; ++p) team.push_back(&sim.player_as<ResyncDefender>(p));
  const std::int64_t tb = team.front()->params().epoch_length();
  const Round horizon = sim.instance().horizon;
  sim.add_observer([team, tb, horizon, &epochs](const RoundRecord& r) {
    const std::int64_t e = r.t / tb;
    if (epochs.empty() || epochs.back().epoch != e) {
      EpochRecord rec;
      rec.epoch = e;
      rec.complete = false;
      for (const auto* d : team) rec.exploring.push_back(d->phase() == EpochPhase::kExploration);
      rec.restart.assign(team.size(), false);
      epochs.push_back(std::move(rec));
    }
    auto& rec = epochs.back();
    if (r.attack_cost > 0) rec.adversarial_collision = true;
    const bool epoch_end = (r.t + 1) % tb == 0;
    if (epoch_end || r.t + 1 == horizon) {
      for (std::size_t i = 0; i < team.size(); ++i) rec.restart[i] = team[i]->restart();
      rec.opt_agreement = std::all_of(team.begin(), team.end(), [&](const ResyncDefender* d) {
        return d->opt() == team.front()->opt();
      });
      rec.complete = epoch_end;
    }
  });
}

namespace {

void collect_faults(Simulation& sim, const ExperimentConfig& c, RunResult& out) {
  for (int p = 0; p < c.N; ++p) {
    Player& pl = sim.player(p);
    if (auto* s = dynamic_cast<SicMmabDefender*>(&pl)) {
      if (s->desync_fault()) out.faults.push_back("defender " + std::to_string(p) + ": desynchronized");
      if (s->init_failed()) out.faults.push_back("defender " + std::to_string(p) + ": musical chairs did not settle");
    } else if (auto* r = dynamic_cast<Resync2Defender*>(&pl)) {
      if (r->init_failed()) out.faults.push_back("defender " + std::to_string(p) + ": orthogonalization failed");
    }
  }
  for (int q = 0; q < c.M; ++q)
    out.attacker_pulls.push_back(dynamic_cast<Attacker&>(sim.player(c.N + q)).pulls());
}

}  // namespace

Simulation make_simulation(const ExperimentConfig& config, int run) {
  const std::uint64_t seed = run_seed(config.seed, static_cast<std::uint64_t>(run));
  Rng inst_rng = make_stream(seed, stream::kInstance);
  return make_simulation(config, run, sample_instance(config, inst_rng));
}

Simulation make_simulation(const ExperimentConfig& config, int run, BanditInstance inst) {
  const std::uint64_t seed = run_seed(config.seed, static_cast<std::uint64_t>(run));
  inst.horizon = config.T;
  auto defenders = make_defenders(config, inst, seed);
  auto attackers = make_attackers(config, seed);
  return Simulation(std::move(inst), config.effective_sensing(), std::move(defenders), std::move(attackers),
                    make_stream(seed, stream::kEnvironment));
}

RunResult run_single(const ExperimentConfig& config, int run) {
  RunResult out;
  out.run = run;
  out.seed = run_seed(config.seed, static_cast<std::uint64_t>(run));
  try {
    Simulation sim = make_simulation(config, run);
    out.instance = sim.instance();
    if (config.record_epochs && config.algorithm == Algorithm::kResync) record_resync_epochs(sim, config.N, out.epochs);
    try {
      sim.run();
      out.completed = true;
    } catch (const std::exception& e) {
      out.faults.push_back(std::string("round ") + std::to_string(sim.now()) + ": " + e.what());
    }
    collect_faults(sim, config, out);
    out.trace = sim.trace();
  } catch (const std::exception& e) {
    out.faults.push_back(e.what());
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult r{config, std::vector<RunResult>(static_cast<std::size_t>(config.runs)), {}};
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < config.runs; ++i) r.runs[static_cast<std::size_t>(i)] = run_single(config, i);
  r.aggregate = aggregate(r.runs);
  return r;
}

ExperimentResult run_experiment_serial(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult r{config, {}, {}};
  for (int i = 0; i < config.runs; ++i) r.runs.push_back(run_single(config, i));
  r.aggregate = aggregate_serial(r.runs);
  return r;
}

namespace {

std::vector<const RunResult*> usable(const std::vector<RunResult>& runs, std::size_t& rounds) {
  std::vector<const RunResult*> ok;
  for (const auto& r : runs)
    if (r.completed) ok.push_back(&r);
  rounds = ok.empty() ? 0 : ok.front()->trace.rounds();
  for (const auto* r : ok) rounds = std::min(rounds, r->trace.rounds());
  return ok;
}

void round_stats(const std::vector<const RunResult*>& ok, std::size_t t, double& mean, double& sd) {
  // Summation in run order keeps parallel and serial output identical.
  double sum = 0.0;
  for (const auto* r : ok) sum += r->trace.cum_regret[t];
  mean = sum / static_cast<double>(ok.size());
  double sq = 0.0;
  for (const auto* r : ok) {
    const double d = r->trace.cum_regret[t] - mean;
    sq += d * d;
  }
  sd = ok.size() > 1 ? std::sqrt(sq / static_cast<double>(ok.size() - 1)) : 0.0;
}

AggregateTrace aggregate_impl(const std::vector<RunResult>& runs, bool parallel) {
  AggregateTrace a;
  std::size_t rounds = 0;
  const auto ok = usable(runs, rounds);
  a.runs = static_cast<int>(ok.size());
  for (const auto& r : runs) a.final_attack_cost.push_back(r.trace.final_attack_cost());
  a.mean.assign(rounds, 0.0);
  a.stddev.assign(rounds, 0.0);
  if (ok.empty()) return a;
  const auto n = static_cast<std::int64_t>(rounds);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t)
      round_stats(ok, static_cast<std::size_t>(t), a.mean[static_cast<std::size_t>(t)], a.stddev[static_cast<std::size_t>(t)]);
  } else {
    for (std::int64_t t = 0; t < n; ++t)
      round_stats(ok, static_cast<std::size_t>(t), a.mean[static_cast<std::size_t>(t)], a.stddev[static_cast<std::size_t>(t)]);
  }
  return a;
}

}  // namespace

AggregateTrace aggregate(const std::vector<RunResult>& runs) { return aggregate_impl(runs, true); }
AggregateTrace aggregate_serial(const std::vector<RunResult>& runs) { return aggregate_impl(runs, false); }

// ---------------------------------------------------------------------------

ReproCase repro_case(const std::string& figure) {
  ExperimentConfig base;
  base.K = 10;
  base.N = 5;
  base.T = 100000;
  base.runs = 20;
  base.delta_floor = 0.05;
  base.seed = 20240101;
  ReproCase rc;
  rc.name = figure;
  if (figure == "fig3" || figure == "fig4") {
    base.t0 = 3000;
    if (figure == "fig4") {
      base.M = 2;
      base.attack = AttackKind::kBurst;
      base.burst_starts = {0, 50000};
      base.burst_length = 3000;
    }
    for (Algorithm a : {Algorithm::kResync, Algorithm::kMc, Algorithm::kSicMmab}) {
      auto c = base;
      c.algorithm = a;
      rc.configs.push_back(c);
    }
    return rc;
  }
  if (figure == "fig5" || figure == "fig6") {
    base.t0 = 5000;
    base.algorithm = Algorithm::kResync2;
    base.sensing = SensingMode::kDistinguishable;
    if (figure == "fig6") {
      base.M = 4;
      base.attack = AttackKind::kUniform;
      base.uniform_until = 5000;
    }
    rc.configs.push_back(base);
    rc.note = "cdj comparison curve omitted: the CDJ algorithm is not implemented here";
    return rc;
  }
  throw ParameterError("unknown figure '" + figure + "' (expected fig3, fig4, fig5 or fig6)");
}

}  // namespace mpmab
