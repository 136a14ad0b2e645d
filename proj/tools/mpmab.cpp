// Command line front end: simulate, verify-metagame, repro.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpmab/harness.hpp"
#include "mpmab/metagame.hpp"

namespace {

using namespace mpmab;

constexpr int kExitFailure = 1;
constexpr int kExitConformance = 2;

void print_summary(const ExperimentResult& r, std::ostream& out) {
  const auto& c = r.config;
  out << "algo=" << to_string(c.algorithm) << " attacker=" << to_string(c.attack) << " K=" << c.K << " N=" << c.N
      << " M=" << c.M << " T=" << c.T << " t0=" << c.defender_t0() << " sensing=" << to_string(c.effective_sensing())
      << " runs=" << c.runs << " seed=" << c.seed << "\n";
  for (const auto& run : r.runs) {
    out << "  run " << run.run << ": regret=" << run.trace.final_regret()
        << " attack_cost=" << run.trace.final_attack_cost();
    for (std::size_t q = 0; q < run.attacker_pulls.size(); ++q) out << (q ? "," : " attacker_pulls=") << run.attacker_pulls[q];
    for (const auto& f : run.faults) out << "\n    fault: " << f;
    out << "\n";
  }
  if (!r.aggregate.mean.empty())
    out << "  mean final regret " << r.aggregate.mean.back() << " (std " << r.aggregate.stddev.back() << ", "
        << r.aggregate.runs << " completed runs)\n";
}

// Replays every recorded RESYNC run through the meta-game; returns mismatches.
std::size_t check_conformance(const ExperimentResult& r, std::ostream& out) {
  if (r.config.algorithm != Algorithm::kResync) return 0;
  std::size_t bad = 0;
  for (const auto& run : r.runs) {
    const auto ab = abstract_run(run.epochs);
    for (const auto& m : ab.mismatches) {
      ++bad;
      out << "  conformance: run " << run.run << " epoch " << m.epoch << " predicted " << to_string(m.predicted)
          << " observed " << to_string(m.observed) << (m.opt_agreement ? "" : " (Opt lists disagreed)") << "\n";
    }
  }
  out << "  conformance: " << bad << " mismatches\n";
  return bad;
}

int finish(const ExperimentResult& r, std::size_t mismatches) {
  for (const auto& run : r.runs)
    if (!run.completed) return kExitFailure;
  return mismatches ? kExitConformance : 0;
}

int cmd_simulate(const std::string& config_path, const std::map<std::string, std::string>& overrides) {
  ExperimentConfig c;
  if (!config_path.empty()) c = load_config(config_path);
  for (const auto& [k, v] : overrides) apply_setting(c, k, v);
  c.record_epochs = true;
  c.validate();

  const auto r = run_experiment(c);
  print_summary(r, std::cout);
  const auto mismatches = check_conformance(r, std::cout);
  if (!c.out_csv.empty()) {
    emit_csv(r.runs, c.stride, c.out_csv);
    std::cout << "wrote " << c.out_csv << "\n";
  }
  if (!c.out_svg.empty()) {
    emit_svg({{to_string(c.algorithm), &r.aggregate}}, to_string(c.algorithm) + " vs " + to_string(c.attack), c.stride,
             c.out_svg);
    std::cout << "wrote " << c.out_svg << "\n";
  }
  return finish(r, mismatches);
}

int cmd_verify(int horizon, int budget, bool charge_desync) {
  if (horizon < 1 || horizon > 16) throw ParameterError("horizon must lie in [1, 16]");
  if (budget < 0) budget = horizon;
  const auto r = verify_bound(horizon, budget, {charge_desync});
  std::cout << "horizon " << r.horizon << ", budget " << r.budget << ": " << r.sequences << " sequences, "
            << r.violations << " violations of non-EXPLOIT <= 1 + 3c'\n";
  if (r.first_violation) {
    const auto& v = *r.first_violation;
    std::cout << "counterexample: start " << to_string(v.start) << ", actions";
    for (auto a : v.actions) std::cout << ' ' << to_string(a);
    std::cout << "\n  states";
    for (auto s : meta_trajectory(v.start, v.actions, horizon)) std::cout << ' ' << to_string(s);
    std::cout << "\n  non-EXPLOIT " << v.non_exploit << " with c' = " << v.attacks << "\n";
  }
  std::cout << (r.ok() ? "PASS" : "FAIL") << "\n";
  return r.ok() ? 0 : kExitConformance;
}

int cmd_repro(const std::string& figure, const std::string& out_dir, int runs, long long seed) {
  auto rc = repro_case(figure);
  std::filesystem::create_directories(out_dir);
  std::vector<ExperimentResult> results;
  int code = 0;
  for (auto c : rc.configs) {
    if (runs > 0) c.runs = runs;
    if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
    c.record_epochs = true;
    auto r = run_experiment(c);
    print_summary(r, std::cout);
    const auto mismatches = check_conformance(r, std::cout);
    const auto csv = std::filesystem::path(out_dir) / (figure + "_" + to_string(c.algorithm) + ".csv");
    emit_csv(r.runs, c.stride, csv);
    std::cout << "wrote " << csv.string() << "\n";
    code = std::max(code, finish(r, mismatches));
    results.push_back(std::move(r));
  }
  std::vector<SvgSeries> series;
  for (const auto& r : results) series.push_back({to_string(r.config.algorithm), &r.aggregate});
  const auto svg = std::filesystem::path(out_dir) / (figure + ".svg");
  const auto& c0 = results.front().config;
  emit_svg(series,
           figure + ": K=" + std::to_string(c0.K) + " N=" + std::to_string(c0.N) + " M=" + std::to_string(c0.M) +
               " attacker=" + to_string(c0.attack),
           c0.stride, svg);
  std::cout << "wrote " << svg.string() << "\n";

  const auto meta = std::filesystem::path(out_dir) / (figure + "_meta.txt");
  std::ofstream m(meta);
  m << "figure = " << figure << "\n";
  for (const auto& r : results)
    m << "series = " << to_string(r.config.algorithm) << " (runs " << r.config.runs << ", seed " << r.config.seed
      << ", t0 " << r.config.defender_t0() << ")\n";
  if (!rc.note.empty()) {
    m << "note = " << rc.note << "\n";
    std::cout << "note: " << rc.note << "\n";
  }
  std::cout << "wrote " << meta.string() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-player bandits under adversarial collisions"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a batch of simulations");
  std::string config_path;
  sim->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  const std::vector<std::pair<std::string, std::string>> flags{
      {"--algo", "resync|resync2|mc|sicmmab|genie"},
      {"--attacker", "none|mc|sicmmab|desync|lowerbound|burst|uniform"},
      {"--K", "arms"},
      {"--N", "defenders"},
      {"--M", "attackers"},
      {"--T", "horizon"},
      {"--delta-floor", "minimum gap of sampled instances"},
      {"--t0", "hopping/exploration length override"},
      {"--seed", "master seed"},
      {"--runs", "independent runs"},
      {"--stride", "CSV logging stride"},
      {"--out-csv", "CSV output path"},
      {"--out-svg", "SVG output path"},
      {"--sensing", "nd|d"},
      {"--attack-budget", "budget of the lower-bound attacker"},
      {"--uniform-until", "last round (exclusive) of uniform attacks"},
      {"--burst-starts", "comma separated burst start rounds"},
      {"--burst-length", "rounds per burst"},
  };
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [name, help] : flags) opts[name] = sim->add_option(name, values[name], help);

  auto* verify = app.add_subcommand("verify-metagame", "exhaustively check the non-EXPLOIT epoch bound");
  int horizon = 12;
  int budget = -1;
  bool charge_desync = false;
  verify->add_option("--horizon", horizon, "sequence length H")->required();
  verify->add_option("--budget", budget, "largest attack count checked (default H)");
  verify->add_flag("--charge-desync-start", charge_desync, "charge a DESYNC start state with the C' that caused it");

  auto* repro = app.add_subcommand("repro", "re-run one of the reference experiments");
  std::string figure;
  std::string out_dir = ".";
  int runs = 0;
  long long seed = -1;
  repro->add_option("figure", figure, "fig3|fig4|fig5|fig6")->required()->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6"}));
  repro->add_option("--out-dir", out_dir, "output directory");
  repro->add_option("--runs", runs, "override the run count");
  repro->add_option("--seed", seed, "override the master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      std::map<std::string, std::string> overrides;
      for (const auto& [name, opt] : opts)
        if (opt->count()) overrides[name.substr(2)] = values[name];
      return cmd_simulate(config_path, overrides);
    }
    if (*verify) return cmd_verify(horizon, budget, charge_desync);
    if (*repro) return cmd_repro(figure, out_dir, runs, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
