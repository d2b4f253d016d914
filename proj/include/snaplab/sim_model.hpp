#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "snaplab/common.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// The simulated system: n process state machines over an m-component
// multi-writer snapshot. All interleaving is explicit via schedules; nothing
// here touches OS threads.
// ---------------------------------------------------------------------------

enum class StepTag { Scan, Update, Output };

// What a process is poised to do next (Output means it has terminated).
struct PoisedStep {
  StepTag tag = StepTag::Scan;
  int comp = -1;  // Update only, 0-based
  Value value;    // Update payload or Output value

  static PoisedStep scan() { return {StepTag::Scan, -1, {}}; }
  static PoisedStep update(int comp, Value v) { return {StepTag::Update, comp, std::move(v)}; }
  static PoisedStep output(Value v) { return {StepTag::Output, -1, std::move(v)}; }

  bool operator==(const PoisedStep& o) const {
    return tag == o.tag && comp == o.comp && value == o.value;
  }
};

// Response handed to the transition function: a view for scans, nothing for
// updates.
struct StepResponse {
  bool is_scan = false;
  std::vector<Value> view;

  static StepResponse scan(std::vector<Value> v) { return {true, std::move(v)}; }
  static StepResponse update() { return {false, {}}; }
};

// Process states are opaque byte strings so configurations hash, compare and
// serialize uniformly.
struct ProtocolSpec {
  int n = 0;
  int m = 0;
  std::vector<Value> initial_values;
  std::function<std::string(int pid, const Value& input)> init_state;
  std::function<PoisedStep(int pid, const std::string& state)> next;
  std::function<std::string(int pid, const std::string& state, const StepResponse&)> transition;
};

struct ProcState {
  std::string state;
  std::optional<Value> output;

  bool terminated() const { return output.has_value(); }
};

struct Configuration {
  std::vector<ProcState> procs;
  std::vector<Value> contents;

  std::string key() const {
    std::string s;
    for (const auto& p : procs) {
      s += p.output ? "!" + *p.output : p.state;
      s += '\x1f';
    }
    for (const auto& c : contents) {
      s += c;
      s += '\x1e';
    }
    return s;
  }
};

inline Configuration initial_configuration(const ProtocolSpec& proto,
                                           const std::vector<Value>& inputs) {
  if (static_cast<int>(inputs.size()) != proto.n)
    fail(Errc::BadParameters, "inputs size must equal process count");
  if (static_cast<int>(proto.initial_values.size()) != proto.m)
    fail(Errc::BadParameters, "initial_values size must equal component count");
  Configuration c;
  c.contents = proto.initial_values;
  c.procs.resize(proto.n);
  for (int p = 0; p < proto.n; ++p) {
    c.procs[p].state = proto.init_state(p, inputs[p]);
    PoisedStep first = proto.next(p, c.procs[p].state);
    if (first.tag != StepTag::Scan)
      fail(Errc::AlternationViolation, "process must start with a scan");
  }
  return c;
}

// One executed step of the simulated system.
struct SimEvent {
  int pid = -1;
  StepTag tag = StepTag::Scan;
  int comp = -1;
  Value value;            // update payload
  std::string resp_digest;  // digest of the scan view ("" for updates)
};

struct ExecutionRecord {
  Configuration initial;
  std::vector<SimEvent> events;
};

// Applies pid's next step to config in place. Scans respond with the current
// contents; updates overwrite one component. Enforces the scan/update
// alternation discipline and output-is-terminal.
inline SimEvent apply_step(Configuration& config, int pid, const ProtocolSpec& proto) {
  ProcState& ps = config.procs.at(pid);
  if (ps.terminated()) fail(Errc::StepOnTerminated, "pid " + std::to_string(pid));
  PoisedStep poised = proto.next(pid, ps.state);
  SimEvent ev;
  ev.pid = pid;
  if (poised.tag == StepTag::Output) {
    // next() said Output but the output marker was not set yet; normalize.
    ps.output = poised.value;
    fail(Errc::StepOnTerminated, "pid " + std::to_string(pid));
  }
  if (poised.tag == StepTag::Scan) {
    StepResponse resp = StepResponse::scan(config.contents);
    ps.state = proto.transition(pid, ps.state, resp);
    ev.tag = StepTag::Scan;
    ev.resp_digest = digest(join(config.contents, ","));
    PoisedStep after = proto.next(pid, ps.state);
    if (after.tag == StepTag::Output) ps.output = after.value;
    if (after.tag == StepTag::Scan)
      fail(Errc::AlternationViolation, "two scans without an update, pid " + std::to_string(pid));
  } else {
    if (poised.comp < 0 || poised.comp >= static_cast<int>(config.contents.size()))
      fail(Errc::BadParameters, "update component out of range");
    config.contents[poised.comp] = poised.value;
    ps.state = proto.transition(pid, ps.state, StepResponse::update());
    ev.tag = StepTag::Update;
    ev.comp = poised.comp;
    ev.value = poised.value;
    PoisedStep after = proto.next(pid, ps.state);
    if (after.tag != StepTag::Scan)
      fail(Errc::AlternationViolation,
           "update must be followed by a scan, pid " + std::to_string(pid));
  }
  return ev;
}

struct SchedulePolicy {
  // Explicit pid sequence, or seeded uniform choice among live processes.
  bool is_explicit = false;
  std::vector<int> pids;
  uint64_t seed = 0;

  static SchedulePolicy explicit_order(std::vector<int> p) { return {true, std::move(p), 0}; }
  static SchedulePolicy seeded(uint64_t s) { return {false, {}, s}; }
};

struct RunResult {
  ExecutionRecord record;
  bool all_output = false;
  std::vector<std::optional<Value>> outputs;
};

inline RunResult run_schedule(const ProtocolSpec& proto, const std::vector<Value>& inputs,
                              const SchedulePolicy& schedule, int budget) {
  if (budget <= 0) fail(Errc::BadParameters, "budget must be positive");
  RunResult rr;
  Configuration config = initial_configuration(proto, inputs);
  rr.record.initial = config;
  Rng rng(schedule.seed);
  size_t cursor = 0;
  for (int step = 0; step < budget; ++step) {
    std::vector<int> live;
    for (int p = 0; p < proto.n; ++p)
      if (!config.procs[p].terminated()) live.push_back(p);
    if (live.empty()) break;
    int pid = -1;
    if (schedule.is_explicit) {
      // Skip scheduled pids that already terminated; stop at sequence end.
      while (cursor < schedule.pids.size() &&
             config.procs[schedule.pids[cursor]].terminated())
        ++cursor;
      if (cursor >= schedule.pids.size()) break;
      pid = schedule.pids[cursor++];
    } else {
      pid = live[rng.pick(static_cast<int>(live.size()))];
    }
    rr.record.events.push_back(apply_step(config, pid, proto));
  }
  rr.all_output = true;
  for (int p = 0; p < proto.n; ++p) {
    rr.outputs.push_back(config.procs[p].output);
    if (!config.procs[p].terminated()) rr.all_output = false;
  }
  return rr;
}

// Line-delimited serialization of an execution record: one event per line.
inline void write_execution_record(std::ostream& os, const ExecutionRecord& rec) {
  int seq = 0;
  for (const auto& ev : rec.events) {
    os << seq++ << '\t' << ev.pid << '\t'
       << (ev.tag == StepTag::Scan ? "scan" : "update") << '\t' << ev.comp << '\t'
       << ev.value << '\t' << ev.resp_digest << '\n';
  }
}

// ---------------------------------------------------------------------------
// x-obstruction-freedom checking
// ---------------------------------------------------------------------------

struct XofOptions {
  int budget = 64;        // max steps along any explored schedule
  bool exhaustive = true;  // exhaustive DFS; otherwise seeded sampling
  int samples = 256;       // sampling mode only
  uint64_t seed = 1;
};

struct XofReport {
  bool ok = true;
  long explored = 0;
  std::vector<int> counterexample;  // schedule that failed to terminate
  bool livelock = false;            // counterexample revisits a configuration
};

namespace detail {

inline bool xof_done(const Configuration& c, const std::set<int>& pids) {
  for (int p : pids)
    if (!c.procs[p].terminated()) return false;
  return true;
}

inline bool xof_dfs(const ProtocolSpec& proto, const Configuration& config,
                    const std::set<int>& pids, int remaining, XofReport& report,
                    std::unordered_map<std::string, int>& verified,
                    std::unordered_set<std::string>& on_path, std::vector<int>& path) {
  if (xof_done(config, pids)) return true;
  std::string key = config.key();
  if (on_path.count(key)) {
    report.ok = false;
    report.livelock = true;
    report.counterexample = path;
    return false;
  }
  if (remaining == 0) {
    report.ok = false;
    report.counterexample = path;
    return false;
  }
  auto it = verified.find(key);
  if (it != verified.end() && it->second >= remaining) return true;
  on_path.insert(key);
  for (int p : pids) {
    if (config.procs[p].terminated()) continue;
    Configuration child = config;
    apply_step(child, p, proto);
    ++report.explored;
    path.push_back(p);
    bool ok = xof_dfs(proto, child, pids, remaining - 1, report, verified, on_path, path);
    path.pop_back();
    if (!ok) {
      on_path.erase(key);
      return false;
    }
  }
  on_path.erase(key);
  int& best = verified[key];
  if (remaining > best) best = remaining;
  return true;
}

}  // namespace detail

// Explores {pids}-only schedules from config. Exhaustively when requested
// (with memoization and on-path cycle detection), otherwise seeded sampling.
// ok=false means some explored schedule did not terminate within budget.
inline XofReport check_x_of(const ProtocolSpec& proto, const Configuration& config,
                            const std::set<int>& pids, const XofOptions& opt = {}) {
  XofReport report;
  if (pids.empty()) return report;
  if (opt.exhaustive) {
    std::unordered_map<std::string, int> verified;
    std::unordered_set<std::string> on_path;
    std::vector<int> path;
    detail::xof_dfs(proto, config, pids, opt.budget, report, verified, on_path, path);
    return report;
  }
  Rng rng(opt.seed);
  std::vector<int> idx(pids.begin(), pids.end());
  for (int s = 0; s < opt.samples; ++s) {
    Configuration c = config;
    std::vector<int> path;
    bool done = false;
    for (int step = 0; step < opt.budget; ++step) {
      if (detail::xof_done(c, pids)) {
        done = true;
        break;
      }
      std::vector<int> live;
      for (int p : idx)
        if (!c.procs[p].terminated()) live.push_back(p);
      int pid = live[rng.pick(static_cast<int>(live.size()))];
      apply_step(c, pid, proto);
      ++report.explored;
      path.push_back(pid);
    }
    if (!done && !detail::xof_done(c, pids)) {
      report.ok = false;
      report.counterexample = path;
      return report;
    }
  }
  return report;
}

// All configurations reachable from the initial one within `depth` steps of
// any process. Desk-scale tool for exhaustive obstruction-freedom checks.
inline std::vector<Configuration> reachable_configs(const ProtocolSpec& proto,
                                                    const std::vector<Value>& inputs,
                                                    int depth) {
  std::vector<Configuration> out;
  std::unordered_set<std::string> seen;
  std::vector<std::pair<Configuration, int>> frontier;
  Configuration c0 = initial_configuration(proto, inputs);
  seen.insert(c0.key());
  out.push_back(c0);
  frontier.emplace_back(std::move(c0), 0);
  while (!frontier.empty()) {
    auto [c, d] = std::move(frontier.back());
    frontier.pop_back();
    if (d == depth) continue;
    for (int p = 0; p < proto.n; ++p) {
      if (c.procs[p].terminated()) continue;
      Configuration child = c;
      apply_step(child, p, proto);
      if (seen.insert(child.key()).second) {
        out.push_back(child);
        frontier.emplace_back(std::move(child), d + 1);
      }
    }
  }
  return out;
}

}  // namespace snaplab
