// Batch front door: run simulations and checkers, manage seeds, emit traces
// and reports, evaluate the bound formulas.
//
// Exit codes: 0 success, 1 violation, 2 bad configuration, 3 budget exhausted.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "snaplab/bounds.hpp"
#include "snaplab/brute_force.hpp"
#include "snaplab/engine.hpp"
#include "snaplab/engine_analysis.hpp"
#include "snaplab/io.hpp"
#include "snaplab/lin_checker.hpp"
#include "snaplab/ndst_toys.hpp"
#include "snaplab/stress.hpp"
#include "snaplab/zoo.hpp"

namespace fs = std::filesystem;
using namespace snaplab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

uint64_t default_seed() {
  if (const char* env = std::getenv("SNAPLAB_SEED")) return std::strtoull(env, nullptr, 10);
  return 1;
}

std::vector<Value> parse_inputs(const std::string& csv) {
  std::vector<Value> out;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t p = csv.find(',', start);
    if (p == std::string::npos) {
      out.push_back(csv.substr(start));
      break;
    }
    out.push_back(csv.substr(start, p - start));
    start = p + 1;
  }
  return out;
}

struct SimulateArgs {
  std::string protocol = "starved_consensus";
  int n = 2, k = 1, m = 1;
  double eps = 0.25;
  int f = 2, d = 1;
  std::string inputs = "0,1";
  uint64_t seed = default_seed();
  long steps = 200000;
  long local_budget = 100000;
  std::string out_dir = ".";
};

int cmd_simulate(const SimulateArgs& args) {
  ZooEntry entry;
  SimulationSetup setup;
  try {
    entry = zoo_lookup(args.protocol, {.n = args.n, .k = args.k, .m = args.m, .eps = args.eps});
    setup.f = args.f;
    setup.d = args.d;
    setup.protocol = entry.spec;
    setup.inputs = parse_inputs(args.inputs);
    setup.local_budget = args.local_budget;
    setup.step_budget = args.steps;
    make_partition(setup);
  } catch (const Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  }

  Engine eng(setup);
  RunStatus status;
  try {
    status = eng.run(args.seed);
  } catch (const Error& e) {
    if (e.code() == Errc::LocalSimBudgetExceeded) {
      std::cerr << "budget: " << e.what() << "\n";
      return kExitBudget;
    }
    throw;
  }

  fs::create_directories(args.out_dir);
  {
    std::ofstream os(fs::path(args.out_dir) / "trace.jsonl");
    write_trace(os, eng.world().trace());
  }
  {
    std::ofstream os(fs::path(args.out_dir) / "revisions.jsonl");
    write_revisions(os, eng.log());
  }

  Json report;
  report["protocol"] = entry.name;
  report["params"] = entry.params;
  report["f"] = setup.f;
  report["d"] = setup.d;
  report["seed"] = args.seed;
  report["status"] = status == RunStatus::Completed ? "completed" : "budget-exhausted";
  report["sw_steps"] = eng.world().trace().events.size();

  bool replay_ok = false;
  if (status == RunStatus::Completed) {
    Intermediate inter = intermediate_execution(eng);
    BlockDecomposition decomp = block_decomposition(eng, inter);
    SimExecution sigma = reconstruct(eng, inter, decomp);
    ReplayResult rr = replay_validate(eng, inter, sigma);
    {
      std::ofstream os(fs::path(args.out_dir) / "decomposition.jsonl");
      write_decomposition(os, decomp);
    }
    {
      std::ofstream os(fs::path(args.out_dir) / "sigma.jsonl");
      write_sigma(os, sigma);
    }
    replay_ok = inter.violations.ok() && decomp.violations.ok() && rr.report.ok() &&
                rr.all_sim_outputs_present;
    Json outs = Json::array();
    std::vector<Value> out_values;
    for (int i = 0; i < setup.f; ++i) {
      outs.push_back(*eng.output(i));
      out_values.push_back(*eng.output(i));
    }
    report["outputs"] = outs;
    report["task_valid"] = validate_task(entry.task, setup.inputs, out_values);
    report["replay_ok"] = replay_ok;
    Json viol = Json::array();
    for (const auto& v : inter.violations.violations) viol.push_back(v);
    for (const auto& v : decomp.violations.violations) viol.push_back(v);
    for (const auto& v : rr.report.violations) viol.push_back(v);
    report["violations"] = viol;
    report["revisions"] = eng.log().revisions.size();
  }

  // per-simulator operation and step counts against the covering bounds
  {
    const Trace& trace = eng.world().trace();
    Json counts = Json::array();
    for (int i = 0; i < setup.f; ++i) {
      long blocks = 0, ops = 0, steps = 0, yields = 0;
      for (const auto& op : trace.ops) {
        if (op.actor != i) continue;
        ++ops;
        if (op.kind == AugOpKind::BlockUpdate) {
          ++blocks;
          if (op.complete && op.yielded) ++yields;
        }
      }
      for (const auto& ev : trace.events)
        if (ev.actor == i) ++steps;
      Json c{{"sim", i}, {"ops", ops}, {"blocks", blocks}, {"yields", yields}, {"steps", steps}};
      if (setup.d == 0) {
        c["block_bound"] = b_closed(setup.protocol.m, i + 1);
        c["step_bound"] = step_bound(setup.f, setup.protocol.m);
      }
      counts.push_back(c);
    }
    report["simulators"] = counts;
  }

  {
    std::ofstream os(fs::path(args.out_dir) / "report.json");
    os << report.dump(2) << "\n";
  }
  std::cout << report.dump(2) << "\n";
  if (status != RunStatus::Completed) return kExitBudget;
  return replay_ok ? kExitOk : kExitViolation;
}

struct StressArgs {
  int f = 3, m = 2;
  long runs = 1000;
  int ops = 3;
  uint64_t seed = default_seed();
};

int cmd_stress(const StressArgs& args) {
  long violations = 0, scans = 0, blocks = 0, yields = 0;
  for (long run = 0; run < args.runs; ++run) {
    uint64_t seed = args.seed + static_cast<uint64_t>(run);
    Rng rng(seed * 0x9e3779b9ull + 17);
    auto scripts = random_scripts(args.f, args.m, args.ops, rng);
    Trace trace = run_scripts(args.f, args.m, scripts, seed);
    FullCheck fc = check_all(trace);
    if (!fc.ok()) {
      ++violations;
      for (const auto& v : fc.merged().violations)
        std::cerr << "seed " << seed << ": " << v << "\n";
    }
    for (const auto& op : trace.ops) {
      if (op.kind == AugOpKind::Scan)
        ++scans;
      else {
        ++blocks;
        if (op.complete && op.yielded) ++yields;
      }
    }
  }
  Json summary{{"runs", args.runs},   {"f", args.f},         {"m", args.m},
               {"scans", scans},      {"blocks", blocks},    {"yields", yields},
               {"violations", violations}};
  std::cout << summary.dump(2) << "\n";
  return violations == 0 ? kExitOk : kExitViolation;
}

int cmd_checklin(const std::string& path, int brute_limit) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "config: cannot open " << path << "\n";
    return kExitConfig;
  }
  Trace trace;
  try {
    trace = read_trace(is);
  } catch (const Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  }
  FullCheck fc = check_all(trace);
  Report merged = fc.merged();
  Json report{{"events", trace.events.size()},
              {"ops", trace.ops.size()},
              {"checked", merged.checked},
              {"violations", merged.violations}};
  long items = 0;
  for (const auto& op : trace.ops) {
    if (op.kind == AugOpKind::Scan && op.complete) ++items;
    if (op.kind == AugOpKind::BlockUpdate && op.x_seq >= 0)
      items += static_cast<long>(op.comps.size());
  }
  if (items <= brute_limit) report["brute_force_linearizable"] = brute_force_linearizable(trace, brute_limit);
  std::cout << report.dump(2) << "\n";
  return fc.ok() ? kExitOk : kExitViolation;
}

struct BoundsArgs {
  int m = 0, f = 0;
  long long n = 0, k = 0, x = 0;
  std::string task;
  double eps = 0.0;
  double L = 0.0;
};

int cmd_bounds(const BoundsArgs& args) {
  try {
    if (args.task == "eps") {
      EpsBound b = eps_space_bound(args.n, args.eps);
      Json j{{"task", "eps-agreement"}, {"n", args.n},  {"eps", args.eps},
             {"by_processes", b.by_processes}, {"by_steps", b.by_steps}, {"bound", b.bound}};
      if (args.L > 0) j["general_with_L"] = general_space_bound(args.n, 2, args.L);
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    }
    if (args.n > 0) {
      long long b = kset_space_bound(args.n, args.k, args.x);
      Json j{{"task", args.k == 1 ? "consensus" : "k-set"},
             {"n", args.n}, {"k", args.k}, {"x", args.x}, {"registers", b}};
      std::cout << j.dump(2) << "\n";
      std::cout << b << "\n";
      return kExitOk;
    }
    if (args.m > 0) {
      int f = args.f > 0 ? args.f : 2;
      BoundsReport rep = bounds_report(args.m, f);
      Json a = Json::array(), b = Json::array();
      for (int r = 1; r <= rep.m; ++r) a.push_back(rep.a[r]);
      for (int i = 1; i <= rep.f; ++i) b.push_back(rep.b[i]);
      Json j{{"m", rep.m}, {"f", rep.f}, {"a", a}, {"b", b}, {"step_bound", rep.steps}};
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kExitConfig;
  }
  std::cerr << "config: pass --m, or --n/--k/--x, or --task eps --eps E --n N\n";
  return kExitConfig;
}

struct TransformArgs {
  std::string machine_path;
  std::string out_path = "derived_machine.jsonl";
  int depth = 10;
  bool emit_toy = false;
};

int cmd_transform(const TransformArgs& args) {
  NDMachine mach;
  if (args.emit_toy) {
    mach = adopt_insist_toy().machine;
    if (!args.machine_path.empty()) {
      std::ofstream os(args.machine_path);
      write_machine(os, mach);
      std::cout << "wrote bundled machine to " << args.machine_path << "\n";
      return kExitOk;
    }
  } else {
    std::ifstream is(args.machine_path);
    if (!is) {
      std::cerr << "config: cannot open " << args.machine_path << "\n";
      return kExitConfig;
    }
    try {
      mach = read_machine(is);
    } catch (const Error& e) {
      std::cerr << "config: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  SoloPathInfo info = solo_path_table(mach);
  NDMachine det = derive(mach);
  Report subset = check_subset(mach, det);
  OfReport of = verify_of(det, mach.initial_states, args.depth);
  {
    std::ofstream os(args.out_path);
    write_machine(os, det);
  }
  Json ell = Json::array();
  for (long long l : info.ell) ell.push_back(l);
  Json j{{"states", mach.num_states},
         {"solo_terminating", info.solo_terminating()},
         {"ell", ell},
         {"subset_ok", subset.ok()},
         {"configs_explored", of.configs_explored},
         {"max_solo_len", of.max_solo_len},
         {"violations", of.report.violations},
         {"derived", args.out_path}};
  std::cout << j.dump(2) << "\n";
  return subset.ok() && of.report.ok() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation laboratory for asynchronous shared-memory protocols"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run the simulation on a protocol");
  s->add_option("--protocol", sim.protocol, "protocol name");
  s->add_option("--n", sim.n, "process count parameter");
  s->add_option("--k", sim.k, "k-set parameter");
  s->add_option("--m", sim.m, "component count (starved_consensus)");
  s->add_option("--eps", sim.eps, "epsilon parameter");
  s->add_option("--f", sim.f, "real process count");
  s->add_option("--d", sim.d, "direct simulator count");
  s->add_option("--inputs", sim.inputs, "comma-separated simulator inputs");
  s->add_option("--seed", sim.seed, "scheduler seed");
  s->add_option("--steps", sim.steps, "base step budget");
  s->add_option("--local-budget", sim.local_budget, "local simulation budget");
  s->add_option("--out", sim.out_dir, "artifact directory");

  StressArgs st;
  auto* t = app.add_subcommand("stress", "seeded schedules through the snapshot checkers");
  t->add_option("--f", st.f, "process count");
  t->add_option("--m", st.m, "component count");
  t->add_option("--runs", st.runs, "number of seeded runs");
  t->add_option("--ops", st.ops, "max operations per process");
  t->add_option("--seed", st.seed, "base seed");

  std::string checklin_path;
  int brute_limit = 8;
  auto* c = app.add_subcommand("checklin", "run every checker on a stored trace");
  c->add_option("--trace", checklin_path, "trace file")->required();
  c->add_option("--brute-limit", brute_limit, "max abstract ops for the oracle");

  BoundsArgs bd;
  auto* b = app.add_subcommand("bounds", "evaluate the space and counting bounds");
  b->add_option("--m", bd.m, "components (counting tables)");
  b->add_option("--f", bd.f, "simulators (counting tables)");
  b->add_option("--n", bd.n, "processes (space bounds)");
  b->add_option("--k", bd.k, "set-agreement parameter");
  b->add_option("--x", bd.x, "obstruction-freedom parameter");
  b->add_option("--task", bd.task, "eps for approximate agreement");
  b->add_option("--eps", bd.eps, "epsilon");
  b->add_option("--L", bd.L, "step lower bound for the general form");

  TransformArgs tr;
  auto* x = app.add_subcommand("transform", "derive an obstruction-free machine");
  x->add_option("--machine", tr.machine_path, "machine description file");
  x->add_option("--out", tr.out_path, "derived machine output");
  x->add_option("--depth", tr.depth, "reachability exploration depth");
  x->add_flag("--emit-toy", tr.emit_toy, "write or use the bundled machine");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return cmd_simulate(sim);
    if (*t) return cmd_stress(st);
    if (*c) return cmd_checklin(checklin_path, brute_limit);
    if (*b) return cmd_bounds(bd);
    if (*x) return cmd_transform(tr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitConfig;
}
