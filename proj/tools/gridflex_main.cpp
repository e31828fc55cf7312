// gridflex command line: validate instances, solve single cases, sweep the
// configuration x penetration grid, and synthesize EV demand profiles.
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridflex/case_runner.hpp"
#include "gridflex/ev/corpus.hpp"
#include "gridflex/ev/events.hpp"
#include "gridflex/ev/fleet.hpp"
#include "gridflex/instance_io.hpp"
#include "gridflex/model.hpp"
#include "gridflex/mps.hpp"
#include "gridflex/results_io.hpp"
#include "gridflex/sweep.hpp"

namespace {

using namespace gridflex;

constexpr int kOk = 0;
constexpr int kBadInput = 1;     // malformed content, failed validation, bad reference
constexpr int kMissingFile = 2;  // file absent or unreadable
constexpr int kInfeasibleExit = 3;
constexpr int kLimitExit = 4;
constexpr int kInternal = 70;

int exit_code_for(CaseStatus s) {
  switch (s) {
    case CaseStatus::Feasible: return kOk;
    case CaseStatus::Infeasible: return kInfeasibleExit;
    case CaseStatus::LimitReached: return kLimitExit;
    case CaseStatus::Error: return kInternal;
  }
  return kInternal;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const FileError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kMissingFile;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const ReferenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
}

// flags shared by solve and sweep; strings are resolved into scfg after parse
struct SolverFlags {
  SolverConfig scfg;
  std::string bess = "exact";
  std::string backend = "bnb";

  void attach(CLI::App* cmd) {
    cmd->add_option("--hours", scfg.hours, "solve only the first N hours (default: instance horizon)")
        ->check(CLI::Range(1, kHoursPerDay));
    cmd->add_option("--bess-binaries", bess, "battery charge/discharge exclusivity: exact or relaxed")
        ->check(CLI::IsMember({"exact", "relaxed"}));
    cmd->add_option("--solver", backend, "bnb (branch and bound) or enum (per-hour topology enumeration)")
        ->check(CLI::IsMember({"bnb", "enum"}));
    cmd->add_option("--big-m", scfg.big_m_override, "override the switching big-M (0: derive from ratings)");
    cmd->add_option("--node-limit", scfg.node_limit, "maximum branch-and-bound nodes");
    cmd->add_option("--time-limit", scfg.time_limit_s, "wall-clock limit per solve in seconds (0: none)");
  }

  SolverConfig resolve() const {
    SolverConfig s = scfg;
    s.bess_binaries = bess == "relaxed" ? BessBinaryMode::Relaxed : BessBinaryMode::Exact;
    s.solver = backend == "enum" ? SolverBackend::Enumeration : SolverBackend::BranchAndBound;
    return s;
  }
};

int load_and_validate(const std::string& path, NetworkInstance& inst) {
  inst = load_instance_file(path);
  const ValidationReport rep = validate_instance(inst);
  if (!rep.ok()) {
    for (const std::string& v : rep.violations) {
      std::fprintf(stderr, "violation: %s\n", v.c_str());
    }
    return kBadInput;
  }
  return kOk;
}

int run_validate(const std::string& path) {
  NetworkInstance inst;
  const int rc = load_and_validate(path, inst);
  if (rc != kOk) return rc;
  std::printf("ok: %s (%zu buses, %zu lines, %zu substations, horizon %d)\n", inst.name.c_str(),
              inst.buses.size(), inst.lines.size(), inst.substations.size(), inst.horizon);
  return kOk;
}

struct SolveArgs {
  std::string instance;
  std::string config = "sdn";
  double penetration = 1.0;
  bool penetration_given = false;
  std::string ev_profile;
  std::string export_mps;
  std::string out;
  SolverFlags flags;
};

void print_case_summary(std::FILE* to, const CaseResult& res) {
  if (res.status == CaseStatus::Feasible) {
    std::fprintf(to, "feasible: cost %.6f, bound %.6f, %ld nodes, %ld lp iterations, %.0f ms\n",
                 res.cost, res.best_bound, res.stats.nodes, res.stats.lp_iterations,
                 res.stats.wall_ms);
  } else {
    std::fprintf(to, "%s%s%s\n", to_string(res.status), res.message.empty() ? "" : ": ",
                 res.message.c_str());
  }
}

int run_solve(const SolveArgs& a) {
  NetworkInstance inst;
  int rc = load_and_validate(a.instance, inst);
  if (rc != kOk) return rc;

  const bool has_profile = !a.ev_profile.empty();
  if (a.penetration_given && !has_profile) {
    std::fprintf(stderr, "error: --penetration scales an EV profile, pass --ev-profile too\n");
    return kBadInput;
  }
  if (has_profile) {
    const EvDemandProfile prof = load_ev_profile_file(a.ev_profile);
    inst = apply_ev_demand(inst, prof, a.penetration);
  }

  SolverConfig scfg = a.flags.resolve();
  if (scfg.hours > 0) {
    inst = with_horizon(inst, scfg.hours);
  }
  const int hours_flag = scfg.hours;
  scfg.hours = 0;

  CaseConfig cc = case_config_from_name(a.config);
  cc.penetration = has_profile ? a.penetration : 0.0;

  if (!a.export_mps.empty()) {
    const ModelBuild mb = build_case_model(inst, cc, scfg);
    std::string model_name = inst.name.empty() ? "model" : inst.name;
    for (char& ch : model_name) {
      if (ch == ' ') ch = '-';
    }
    write_text_file(a.export_mps, to_mps(mb.problem, model_name + "-" + a.config));
  }

  const CaseResult res = solve_case(inst, cc, scfg);

  RunManifest m;
  m.instance = inst.name;
  m.instance_path = a.instance;
  m.config = a.config;
  m.penetration = cc.penetration;
  m.hours = hours_flag;
  m.solver = a.flags.backend;
  m.bess_binaries = a.flags.bess;
  m.ev_profile = a.ev_profile;

  const std::string doc = results_to_json(m, res);
  if (a.out.empty()) {
    std::fputs(doc.c_str(), stdout);
    print_case_summary(stderr, res);
  } else {
    write_text_file(a.out, doc);
    print_case_summary(stdout, res);
  }
  return exit_code_for(res.status);
}

struct SweepArgs {
  std::string instance;
  std::string ev_profile;
  std::vector<std::string> configs = {"sdn", "sdntr", "sdn-der", "sdntr-der"};
  std::vector<double> penetrations = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int jobs = 1;
  std::string out;
  std::string csv;
  std::string artifact_dir;
  SolverFlags flags;
};

int run_sweep_cmd(const SweepArgs& a) {
  NetworkInstance inst;
  int rc = load_and_validate(a.instance, inst);
  if (rc != kOk) return rc;
  const EvDemandProfile prof = load_ev_profile_file(a.ev_profile);

  SolverConfig scfg = a.flags.resolve();
  if (scfg.hours > 0) {
    inst = with_horizon(inst, scfg.hours);
  }
  const int hours_flag = scfg.hours;
  scfg.hours = 0;

  SweepPlan plan;
  plan.configs = a.configs;
  plan.penetrations = a.penetrations;
  plan.solver = scfg;
  plan.jobs = a.jobs;
  plan.artifact_dir = a.artifact_dir;

  const SweepResult sw = run_sweep(inst, prof, plan);

  RunManifest m;
  m.instance = inst.name;
  m.instance_path = a.instance;
  m.hours = hours_flag;
  m.solver = a.flags.backend;
  m.bess_binaries = a.flags.bess;
  m.ev_profile = a.ev_profile;

  const std::string doc = sweep_to_json(m, plan, sw);
  std::FILE* summary = stdout;
  if (a.out.empty()) {
    std::fputs(doc.c_str(), stdout);
    summary = stderr;
  } else {
    write_text_file(a.out, doc);
  }
  if (!a.csv.empty()) {
    write_text_file(a.csv, sweep_to_csv(sw));
  }

  for (const std::string& name : plan.configs) {
    const double f = feasibility_frontier(sw.cells, name);
    if (f < 0.0) {
      std::fprintf(summary, "%-10s feasible at no penetration\n", name.c_str());
    } else {
      std::fprintf(summary, "%-10s feasible up to penetration %g\n", name.c_str(), f);
    }
  }
  bool any_limit = false;
  bool any_error = false;
  for (const SweepCell& c : sw.cells) {
    if (c.result.status == CaseStatus::LimitReached) any_limit = true;
    if (c.result.status == CaseStatus::Error) {
      any_error = true;
      std::fprintf(stderr, "cell %s p=%g failed: %s\n", c.config.c_str(), c.penetration,
                   c.result.message.c_str());
    }
  }
  for (const std::string& v : sw.ordering_violations) {
    std::fprintf(stderr, "ordering violation: %s\n", v.c_str());
  }
  if (any_error || !sw.ordering_violations.empty()) return kInternal;
  if (any_limit) return kLimitExit;
  return kOk;
}

struct EvgenArgs {
  std::uint64_t seed = 42;
  int meters = 40;
  int corpus_days = 120;
  int evs = 1500;
  int sim_days = 30;
  double participation = 0.9;
  std::string weights;
  std::string out;
  std::string out_corpus;
  std::string out_events;
};

std::string events_csv(const std::vector<ChargingEvent>& events) {
  std::string out = "meter,start_minute,duration_min,energy_kwh,mean_power_kw,class\n";
  char buf[192];
  for (const ChargingEvent& e : events) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%s\n", e.meter, e.start_minute,
                  e.duration_min, e.energy_kwh, e.mean_power_kw, to_string(e.ev_class));
    out += buf;
  }
  return out;
}

int run_evgen(const EvgenArgs& a) {
  CorpusConfig ccfg;
  ccfg.meters = a.meters;
  ccfg.days = a.corpus_days;
  const SyntheticCorpus corpus = generate_corpus(ccfg, a.seed);
  if (!a.out_corpus.empty()) {
    write_text_file(a.out_corpus, emit_corpus_csv(corpus));
  }

  const std::vector<ChargingEvent> events = extract_events(corpus, ExtractionConfig{});
  if (!a.out_events.empty()) {
    write_text_file(a.out_events, events_csv(events));
  }

  const FleetModel model = fit_fleet_model(events);
  FleetConfig fcfg;
  fcfg.num_evs = a.evs;
  fcfg.days = a.sim_days;
  fcfg.participation = a.participation;
  const HourlyProfile fleet = simulate_fleet_profile(model, fcfg, a.seed);

  const std::map<int, double> weights = load_bus_weights(read_text_file(a.weights));
  EvDemandProfile demand = distribute_profile(fleet, weights);
  char prov[256];
  std::snprintf(prov, sizeof(prov),
                "synthetic corpus (seed %llu, %d meters, %d days); kde fleet (%d evs, %d days, "
                "participation %g)",
                static_cast<unsigned long long>(a.seed), a.meters, a.corpus_days, a.evs,
                a.sim_days, a.participation);
  demand.provenance = prov;
  demand.days_aggregated = a.sim_days;

  const std::string csv = emit_ev_profile_csv(demand);
  std::FILE* summary = stdout;
  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
    summary = stderr;
  } else {
    write_text_file(a.out, csv);
  }

  std::size_t injected_qualifying = 0;
  for (const InjectedEvent& e : corpus.injected) {
    if (e.power_kw >= 3.0 && e.duration_min >= 30.0) ++injected_qualifying;
  }
  std::size_t by_class[3] = {0, 0, 0};
  for (const ChargingEvent& e : events) ++by_class[static_cast<int>(e.ev_class)];
  double peak = 0.0;
  int peak_hour = 1;
  for (int h = 0; h < kHoursPerDay; ++h) {
    if (fleet[h] > peak) {
      peak = fleet[h];
      peak_hour = h + 1;
    }
  }
  std::fprintf(summary,
               "corpus: %d meters x %d days, %zu sessions injected (%zu above threshold)\n",
               a.meters, a.corpus_days, corpus.injected.size(), injected_qualifying);
  std::fprintf(summary, "extracted: %zu events (low %zu, normal %zu, high %zu)\n", events.size(),
               by_class[0], by_class[1], by_class[2]);
  std::fprintf(summary, "fleet: %d evs x %d days -> %.3f MWh per day, peak %.3f MW at hour %d\n",
               a.evs, a.sim_days, demand.total_energy_mwh(), peak, peak_hour);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial distribution network scheduling with reconfiguration, DERs, and EV demand"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* vcmd = app.add_subcommand("validate", "load an instance and report every violation");
  vcmd->add_option("--instance", validate_path, "instance JSON file")->required();

  SolveArgs solve_args;
  CLI::App* scmd = app.add_subcommand("solve", "solve one configuration at one penetration");
  scmd->add_option("--instance", solve_args.instance, "instance JSON file")->required();
  scmd->add_option("--config", solve_args.config, "sdn, sdntr, sdn-der, or sdntr-der")->required();
  CLI::Option* pen_opt = scmd->add_option("--penetration", solve_args.penetration,
                                          "EV profile scale factor (default 1, needs --ev-profile)");
  scmd->add_option("--ev-profile", solve_args.ev_profile, "per-bus hourly EV demand CSV");
  scmd->add_option("--export-mps", solve_args.export_mps, "also write the model in MPS format");
  scmd->add_option("--out", solve_args.out, "write the results JSON here instead of stdout");
  solve_args.flags.attach(scmd);

  SweepArgs sweep_args;
  CLI::App* wcmd = app.add_subcommand("sweep", "solve the configuration x penetration grid");
  wcmd->add_option("--instance", sweep_args.instance, "instance JSON file")->required();
  wcmd->add_option("--ev-profile", sweep_args.ev_profile, "per-bus hourly EV demand CSV")->required();
  wcmd->add_option("--configs", sweep_args.configs, "configurations to sweep")->delimiter(',');
  wcmd->add_option("--penetrations", sweep_args.penetrations, "penetration levels")->delimiter(',');
  wcmd->add_option("--jobs", sweep_args.jobs, "concurrent cell solves")->check(CLI::Range(1, 64));
  wcmd->add_option("--out", sweep_args.out, "write the sweep JSON here instead of stdout");
  wcmd->add_option("--csv", sweep_args.csv, "also write a flat per-cell CSV table");
  wcmd->add_option("--artifact-dir", sweep_args.artifact_dir,
                   "directory for JSON traces of cells that error or hit limits");
  sweep_args.flags.attach(wcmd);

  EvgenArgs evgen_args;
  CLI::App* ecmd = app.add_subcommand("evgen", "synthesize an EV demand profile end to end");
  ecmd->add_option("--seed", evgen_args.seed, "master seed for corpus and fleet sampling");
  ecmd->add_option("--meters", evgen_args.meters, "meters in the synthetic corpus")
      ->check(CLI::PositiveNumber);
  ecmd->add_option("--corpus-days", evgen_args.corpus_days, "days of metering per meter")
      ->check(CLI::PositiveNumber);
  ecmd->add_option("--evs", evgen_args.evs, "fleet size for the demand simulation")
      ->check(CLI::PositiveNumber);
  ecmd->add_option("--sim-days", evgen_args.sim_days, "days averaged into the mean-day profile")
      ->check(CLI::PositiveNumber);
  ecmd->add_option("--participation", evgen_args.participation,
                   "chance an EV charges on a given day")
      ->check(CLI::Range(0.0, 1.0));
  ecmd->add_option("--weights", evgen_args.weights, "JSON object mapping bus id to demand share")
      ->required();
  ecmd->add_option("--out", evgen_args.out, "write the demand CSV here instead of stdout");
  ecmd->add_option("--out-corpus", evgen_args.out_corpus, "also dump the synthetic meter series");
  ecmd->add_option("--out-events", evgen_args.out_events, "also dump the extracted events");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  solve_args.penetration_given = pen_opt->count() > 0;

  if (vcmd->parsed()) return guarded([&] { return run_validate(validate_path); });
  if (scmd->parsed()) return guarded([&] { return run_solve(solve_args); });
  if (wcmd->parsed()) return guarded([&] { return run_sweep_cmd(sweep_args); });
  if (ecmd->parsed()) return guarded([&] { return run_evgen(evgen_args); });
  return kBadInput;
}
