// Acceptance suite: one check per criterion, one PASS/FAIL line each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "snaplab/bounds.hpp"
#include "snaplab/brute_force.hpp"
#include "snaplab/engine.hpp"
#include "snaplab/engine_analysis.hpp"
#include "snaplab/lin_checker.hpp"
#include "snaplab/ndst.hpp"
#include "snaplab/ndst_toys.hpp"
#include "snaplab/stress.hpp"
#include "snaplab/zoo.hpp"

using namespace snaplab;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
  std::string name;
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared corpus for criteria 1-3: 10^4 seeded schedules, f in 2..4, m in 1..3.
struct Corpus {
  long runs = 0;
  long scans = 0, blocks = 0, yields = 0;
  long step_violations = 0;
  long yield_violations = 0;
  long rule_violations = 0;
  double elapsed = 0;
};

Corpus run_corpus(long runs) {
  Corpus c;
  auto t0 = Clock::now();
  for (long seed = 0; seed < runs; ++seed) {
    int f = 2 + static_cast<int>(seed % 3);
    int m = 1 + static_cast<int>((seed / 3) % 3);
    Rng rng(static_cast<uint64_t>(seed) * 0x9e3779b9ull + 17);
    auto scripts = random_scripts(f, m, 3, rng);
    Trace trace = run_scripts(f, m, scripts, static_cast<uint64_t>(seed));
    c.runs++;
    for (const auto& op : trace.ops) {
      if (op.kind == AugOpKind::Scan)
        c.scans++;
      else {
        c.blocks++;
        if (op.complete && op.yielded) c.yields++;
      }
    }
    c.step_violations += static_cast<long>(check_step_counts(trace).violations.size());
    c.yield_violations += static_cast<long>(check_yield_cause(trace).violations.size());
    for (const auto& op : trace.ops)
      if (op.actor == 0 && op.kind == AugOpKind::BlockUpdate && op.complete && op.yielded)
        c.yield_violations++;
    LinHistory hist = assign_points(trace);
    c.rule_violations += static_cast<long>(check_scan_semantics(hist, trace.m).violations.size());
    c.rule_violations += static_cast<long>(check_block_semantics(hist, trace).violations.size());
    c.rule_violations += static_cast<long>(check_help_durability(trace).violations.size());
    c.rule_violations += static_cast<long>(check_prefix_monotone(trace).violations.size());
  }
  c.elapsed = seconds_since(t0);
  return c;
}

Criterion criterion_step_counts(const Corpus& c) {
  Criterion cr{"1. step counts (6 / 5 / 2k+3) over the stress corpus"};
  cr.pass = c.step_violations == 0 && c.elapsed < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%ld runs, %ld scans, %ld blocks, %ld violations, %.1fs",
                c.runs, c.scans, c.blocks, c.step_violations, c.elapsed);
  cr.detail = buf;
  return cr;
}

Criterion criterion_yield_discipline(const Corpus& c) {
  Criterion cr{"2. yield discipline (q1 never yields; lower-id cause)"};
  cr.pass = c.yield_violations == 0;
  cr.detail = std::to_string(c.yields) + " yields, " + std::to_string(c.yield_violations) +
              " violations";
  return cr;
}

Criterion criterion_linearizability(const Corpus& c) {
  Criterion cr{"3. linearizability: rule checks + brute-force agreement"};
  auto t0 = Clock::now();
  long traces = 0, disagreements = 0;
  std::vector<ScriptOp> menu = {ScriptOp::scan(), ScriptOp::block({0}, {"a"}),
                                ScriptOp::block({1}, {"b"}), ScriptOp::block({0, 1}, {"c", "d"})};
  auto rename = [](ScriptOp op, int proc, int slot) {
    for (size_t g = 0; g < op.values.size(); ++g)
      op.values[g] = "p" + std::to_string(proc) + "s" + std::to_string(slot) + "g" +
                     std::to_string(g);
    return op;
  };
  std::vector<std::pair<int, int>> shapes = {{0, 1}, {1, 0}, {1, 1}, {2, 0}, {0, 2},
                                             {2, 1}, {1, 2}, {3, 0}, {0, 3}};
  for (auto [n0, n1] : shapes) {
    std::vector<Script> s0set, s1set;
    std::function<void(int, Script&, std::vector<Script>&)> gen =
        [&](int left, Script& cur, std::vector<Script>& out) {
          if (left == 0) {
            out.push_back(cur);
            return;
          }
          for (const auto& op : menu) {
            cur.push_back(op);
            gen(left - 1, cur, out);
            cur.pop_back();
          }
        };
    Script tmp;
    gen(n0, tmp, s0set);
    gen(n1, tmp, s1set);
    for (const auto& a : s0set) {
      for (const auto& b : s1set) {
        std::vector<Script> scripts(2);
        for (size_t k = 0; k < a.size(); ++k) scripts[0].push_back(rename(a[k], 0, static_cast<int>(k)));
        for (size_t k = 0; k < b.size(); ++k) scripts[1].push_back(rename(b[k], 1, static_cast<int>(k)));
        for_each_interleaving(2, 2, scripts, [&](const Trace& trace) {
          ++traces;
          bool rules = check_all(trace).ok();
          bool oracle = brute_force_linearizable(trace, 8);
          if (rules != oracle || !rules) ++disagreements;
        });
      }
    }
  }
  double elapsed = seconds_since(t0);
  cr.pass = c.rule_violations == 0 && disagreements == 0 && elapsed < 300.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "corpus rule violations %ld; %ld exhaustive traces, %ld disagreements, %.1fs",
                c.rule_violations, traces, disagreements, elapsed);
  cr.detail = buf;
  return cr;
}

Criterion criterion_counting() {
  Criterion cr{"4. counting formulas a(r), b(i)"};
  bool ok = a_table(3)[1] == 0 && a_table(3)[2] == 3 && a_table(3)[3] == 15 &&
            a_table(3)[3] <= 64;
  for (int m = 1; m <= 5 && ok; ++m) {
    auto rec = b_recurrence(m, 5);
    for (int i = 1; i <= 5 && ok; ++i)
      if (b_closed(m, i) != rec[i]) ok = false;
  }
  cr.pass = ok;
  cr.detail = "a(1)=0, a(2)=3, a(3)=15; closed form == recurrence for m,i <= 5";
  return cr;
}

Criterion criterion_runtime_bounds() {
  Criterion cr{"5. runtime bounds in covering-only runs (f=2, m=2)"};
  long runs = 0, violations = 0;
  auto check_run = [&](const ProtocolSpec& proto, const std::vector<Value>& inputs,
                       uint64_t seed) {
    SimulationSetup s;
    s.f = 2;
    s.d = 0;
    s.protocol = proto;
    s.inputs = inputs;
    Engine eng(s);
    if (eng.run(seed) != RunStatus::Completed) return;
    ++runs;
    const Trace& trace = eng.world().trace();
    std::vector<long> blocks(2, 0), steps(2, 0);
    for (const auto& op : trace.ops)
      if (op.kind == AugOpKind::BlockUpdate) blocks[op.actor]++;
    for (const auto& ev : trace.events) steps[ev.actor]++;
    for (int i = 0; i < 2; ++i) {
      if (blocks[i] > b_closed(2, i + 1)) ++violations;
      if (steps[i] > step_bound(2, 2)) ++violations;
      for (const auto& [r, mx] : eng.log().max_stored[i])
        if (mx > static_cast<size_t>(binom(2, r - 1))) ++violations;
    }
  };
  for (uint64_t seed = 0; seed < 60; ++seed)
    check_run(starved_consensus(2, 4).spec, {"0", "1"}, seed);
  for (uint64_t seed = 0; seed < 60; ++seed)
    check_run(kset_of(4, 3).spec, {"0", "1"}, seed);
  cr.pass = runs >= 100 && violations == 0;
  cr.detail = std::to_string(runs) + " completed runs, " + std::to_string(violations) +
              " bound violations";
  return cr;
}

Criterion criterion_reconstruction() {
  Criterion cr{"6. reconstruction oracle (replay of starved consensus runs)"};
  long runs = 0, violations = 0;
  for (int d = 0; d <= 1; ++d) {
    for (uint64_t seed = 0; seed < 60; ++seed) {
      SimulationSetup s;
      s.f = 2;
      s.d = d;
      s.protocol = starved_consensus(1, 2).spec;
      s.inputs = {"0", "1"};
      Engine eng(s);
      if (eng.run(seed) != RunStatus::Completed) continue;
      ++runs;
      Intermediate inter = intermediate_execution(eng);
      BlockDecomposition decomp = block_decomposition(eng, inter);
      SimExecution sigma = reconstruct(eng, inter, decomp);
      ReplayResult rr = replay_validate(eng, inter, sigma);
      long v = static_cast<long>(inter.violations.violations.size() +
                                 decomp.violations.violations.size() +
                                 rr.report.violations.size());
      if (!rr.all_sim_outputs_present) ++v;
      violations += v;
    }
  }
  cr.pass = runs >= 100 && violations == 0;
  cr.detail = std::to_string(runs) + " completed runs, " + std::to_string(violations) +
              " violations";
  return cr;
}

Criterion criterion_lower_bound_demo() {
  Criterion cr{"7. lower-bound demonstration (starved consensus splits; config gate)"};
  long completed = 0;
  bool split = false;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    SimulationSetup s;
    s.f = 2;
    s.d = 1;
    s.protocol = starved_consensus(1, 2).spec;
    s.inputs = {"0", "1"};
    Engine eng(s);
    if (eng.run(seed) != RunStatus::Completed) continue;
    ++completed;
    if (*eng.output(0) != *eng.output(1)) split = true;
  }
  bool rejected = false;
  try {
    SimulationSetup s;
    s.f = 2;
    s.d = 1;
    s.protocol = of_consensus(4).spec;
    s.inputs = {"0", "1"};
    make_partition(s);
  } catch (const Error&) {
    rejected = true;
  }
  cr.pass = completed == 100 && split && rejected;
  cr.detail = std::to_string(completed) + "/100 runs terminated; distinct outputs " +
              (split ? "found" : "missing") + "; oversized config " +
              (rejected ? "rejected" : "accepted");
  return cr;
}

Criterion criterion_ndst() {
  Criterion cr{"8. NDST-to-OF transformation on the bundled machine"};
  auto t0 = Clock::now();
  auto toy = adopt_insist_toy();
  NDMachine det = derive(toy.machine);
  Report subset = check_subset(toy.machine, det);
  OfReport of = verify_of(det, toy.machine.initial_states, 10);
  double elapsed = seconds_since(t0);
  cr.pass = subset.ok() && of.report.ok() && elapsed < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "subset %s; %ld configs, max solo %ld, %zu violations, %.1fs",
                subset.ok() ? "ok" : "BAD", of.configs_explored, of.max_solo_len,
                of.report.violations.size(), elapsed);
  cr.detail = buf;
  return cr;
}

Criterion criterion_bound_calculator() {
  Criterion cr{"9. bound calculator spot values"};
  bool ok = kset_space_bound(10, 1, 1) == 10 && kset_space_bound(10, 3, 1) == 4 &&
            kset_space_bound(10, 3, 3) == 8;
  EpsBound b = eps_space_bound(10, 0.001);
  double expect = std::sqrt(std::log2(std::log(1000.0) / std::log(3.0)) - 2.0);
  ok = ok && b.by_processes == 6.0 && std::abs(b.by_steps - expect) < 1e-12 &&
       b.bound == std::min(6.0, expect);
  cr.pass = ok;
  cr.detail = "consensus(10)=10, kset(10,3,1)=4, kset(10,3,3)=8, eps formula matches";
  return cr;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  Corpus corpus = run_corpus(10000);
  results.push_back(criterion_step_counts(corpus));
  results.push_back(criterion_yield_discipline(corpus));
  results.push_back(criterion_linearizability(corpus));
  results.push_back(criterion_counting());
  results.push_back(criterion_runtime_bounds());
  results.push_back(criterion_reconstruction());
  results.push_back(criterion_lower_bound_demo());
  results.push_back(criterion_ndst());
  results.push_back(criterion_bound_calculator());

  int failures = 0;
  for (const auto& cr : results) {
    std::printf("%s: %s (%s)\n", cr.pass ? "PASS" : "FAIL", cr.name.c_str(), cr.detail.c_str());
    if (!cr.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
