#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "snaplab/common.hpp"
#include "snaplab/lin_checker.hpp"
#include "snaplab/sim_model.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// Nondeterministic solo-terminating protocols over an m-component object
// (per-component register / max-register / fetch-and-increment plus a full
// scan), and the derivation of a deterministic obstruction-free protocol via
// shortest solo paths under expected views.
// ---------------------------------------------------------------------------

struct CompOp {
  enum class Kind { Write, WriteMax, FetchInc };
  Kind kind = Kind::Write;
  Value arg;

  // (new component value, response)
  std::pair<Value, Value> apply(const Value& cur) const {
    switch (kind) {
      case Kind::Write: return {arg, "ok"};
      case Kind::WriteMax:
        return {int_value(std::max(value_as_int(cur), value_as_int(arg))), "ok"};
      case Kind::FetchInc: return {int_value(value_as_int(cur) + 1), cur};
    }
    return {cur, "ok"};
  }

  const char* kind_name() const {
    switch (kind) {
      case Kind::Write: return "write";
      case Kind::WriteMax: return "writemax";
      case Kind::FetchInc: return "fetchinc";
    }
    return "?";
  }
};

// Finite nondeterministic state machine. States are 0..num_states-1 and that
// index order is the total order used for all "first state" selections. Each
// state carries its expected view E (what a scan would return if nobody else
// moved since the last one).
struct NDMachine {
  int m = 0;
  std::vector<Value> initial_values;
  int num_states = 0;
  std::vector<std::optional<Value>> final_output;  // set for final states
  struct Nu {
    bool is_scan = true;
    int comp = -1;
    CompOp op;
  };
  std::vector<Nu> nu;                         // per state; ignored for finals
  std::vector<std::vector<Value>> expected;   // E per state
  std::vector<int> initial_states;            // one per process/input
  std::map<std::pair<int, std::string>, std::vector<int>> delta;  // (state, response key)
  std::vector<std::vector<int>> delta_default;                    // fallback per state

  bool is_final(int s) const { return final_output[s].has_value(); }

  static std::string view_key(const std::vector<Value>& view) { return join(view, "\x1f"); }

  std::string forced_response(int s) const {
    if (is_final(s)) fail(Errc::BadParameters, "final state has no step");
    if (nu[s].is_scan) return view_key(expected[s]);
    return nu[s].op.apply(expected[s][nu[s].comp]).second;
  }

  const std::vector<int>& successors(int s, const std::string& resp_key) const {
    auto it = delta.find({s, resp_key});
    if (it != delta.end()) return it->second;
    return delta_default[s];
  }

  void validate() const {
    if (num_states <= 0) fail(Errc::BadParameters, "machine needs states");
    for (int s = 0; s < num_states; ++s) {
      if (static_cast<int>(expected[s].size()) != m)
        fail(Errc::BadParameters, "expected view size mismatch at state " + std::to_string(s));
      if (is_final(s)) continue;
      if (delta_default[s].empty()) fail(Errc::BadParameters, "empty default transition set");
      if (!nu[s].is_scan && (nu[s].comp < 0 || nu[s].comp >= m))
        fail(Errc::BadParameters, "component out of range at state " + std::to_string(s));
    }
    for (const auto& [key, succs] : delta)
      if (succs.empty()) fail(Errc::BadParameters, "empty transition set");
  }
};

constexpr long long kNoSoloPath = -1;

struct SoloPathInfo {
  std::vector<long long> ell;      // shortest solo-path length, kNoSoloPath if none
  std::vector<int> shortest_succ;  // first successor on a shortest path (-1 if none)

  bool solo_terminating() const {
    for (long long l : ell)
      if (l == kNoSoloPath) return false;
    return true;
  }
};

// Shortest solo-path lengths under forced responses: a reverse BFS over the
// graph whose edges follow delta on the forced response of each state.
inline SoloPathInfo solo_path_table(const NDMachine& mach) {
  mach.validate();
  SoloPathInfo info;
  info.ell.assign(mach.num_states, kNoSoloPath);
  info.shortest_succ.assign(mach.num_states, -1);
  std::vector<std::vector<int>> fwd(mach.num_states);
  std::vector<std::vector<int>> rev(mach.num_states);
  for (int s = 0; s < mach.num_states; ++s) {
    if (mach.is_final(s)) continue;
    fwd[s] = mach.successors(s, mach.forced_response(s));
    for (int t : fwd[s]) rev[t].push_back(s);
  }
  std::deque<int> queue;
  for (int s = 0; s < mach.num_states; ++s)
    if (mach.is_final(s)) {
      info.ell[s] = 0;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    int t = queue.front();
    queue.pop_front();
    for (int s : rev[t]) {
      if (info.ell[s] != kNoSoloPath) continue;
      info.ell[s] = info.ell[t] + 1;
      queue.push_back(s);
    }
  }
  for (int s = 0; s < mach.num_states; ++s) {
    if (mach.is_final(s) || info.ell[s] == kNoSoloPath) continue;
    // first state by the total order among shortest-path successors
    std::vector<int> sorted = fwd[s];
    std::sort(sorted.begin(), sorted.end());
    for (int t : sorted)
      if (info.ell[t] == info.ell[s] - 1) {
        info.shortest_succ[s] = t;
        break;
      }
  }
  return info;
}

// The derived deterministic machine: on the forced response of a
// solo-terminating state, follow the first shortest solo path; on anything
// else, take the first declared successor.
inline NDMachine derive(const NDMachine& mach) {
  SoloPathInfo info = solo_path_table(mach);
  NDMachine det = mach;
  det.delta.clear();
  for (const auto& [key, succs] : mach.delta) {
    std::vector<int> sorted = succs;
    std::sort(sorted.begin(), sorted.end());
    det.delta[key] = {sorted.front()};
  }
  det.delta_default.clear();
  for (int s = 0; s < mach.num_states; ++s) {
    std::vector<int> d = mach.delta_default[s];
    if (!d.empty()) {
      std::sort(d.begin(), d.end());
      d = {d.front()};
    }
    det.delta_default.push_back(d);
  }
  for (int s = 0; s < mach.num_states; ++s) {
    if (mach.is_final(s) || info.ell[s] == kNoSoloPath) continue;
    det.delta[{s, mach.forced_response(s)}] = {info.shortest_succ[s]};
  }
  return det;
}

// delta' is a pointwise restriction of delta.
inline Report check_subset(const NDMachine& orig, const NDMachine& det) {
  Report rep;
  for (const auto& [key, succs] : det.delta) {
    ++rep.checked;
    if (succs.size() != 1) {
      rep.violation("derived transition not deterministic");
      continue;
    }
    const auto& allowed = orig.successors(key.first, key.second);
    if (std::find(allowed.begin(), allowed.end(), succs.front()) == allowed.end())
      rep.violation("derived successor not allowed at state " + std::to_string(key.first));
  }
  for (int s = 0; s < orig.num_states; ++s) {
    if (orig.is_final(s)) continue;
    ++rep.checked;
    const auto& d = det.delta_default[s];
    if (d.size() != 1 ||
        std::find(orig.delta_default[s].begin(), orig.delta_default[s].end(), d.front()) ==
            orig.delta_default[s].end())
      rep.violation("derived default not allowed at state " + std::to_string(s));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Desk-scale obstruction-freedom verification of a (derived) deterministic
// machine: explore reachable configurations of `procs` copies, then check
// that every solo run terminates in exactly the predicted number of steps and
// that ell drops by one along every post-scan solo step.
// ---------------------------------------------------------------------------

struct OfConfig {
  std::vector<int> state;
  std::vector<Value> comps;

  std::string key() const {
    std::string s;
    for (int st : state) s += std::to_string(st) + ",";
    s += "|";
    for (const auto& c : comps) s += c + "\x1f";
    return s;
  }
};

struct OfReport {
  Report report;
  long configs_explored = 0;
  long max_solo_len = 0;
};

namespace ndst_detail {

// One solo step; returns false if the state is final.
inline bool of_step(const NDMachine& mach, OfConfig& c, int p) {
  int s = c.state[p];
  if (mach.is_final(s)) return false;
  const auto& nu = mach.nu[s];
  std::string key;
  if (nu.is_scan) {
    key = NDMachine::view_key(c.comps);
  } else {
    auto [nv, resp] = nu.op.apply(c.comps[nu.comp]);
    c.comps[nu.comp] = nv;
    key = resp;
  }
  const auto& succs = mach.successors(s, key);
  if (succs.size() != 1) fail(Errc::BadParameters, "machine is not deterministic");
  c.state[p] = succs.front();
  return true;
}

}  // namespace ndst_detail

inline OfReport verify_of(const NDMachine& det, const std::vector<int>& initial_states, int depth,
                          long solo_budget = 10000) {
  det.validate();
  SoloPathInfo info = solo_path_table(det);
  OfReport out;
  const int procs = static_cast<int>(initial_states.size());
  OfConfig c0{initial_states, det.initial_values};
  std::unordered_set<std::string> seen{c0.key()};
  std::vector<std::pair<OfConfig, int>> frontier{{c0, 0}};
  std::vector<OfConfig> all{c0};
  while (!frontier.empty()) {
    auto [c, d] = std::move(frontier.back());
    frontier.pop_back();
    if (d == depth) continue;
    for (int p = 0; p < procs; ++p) {
      OfConfig child = c;
      if (!ndst_detail::of_step(det, child, p)) continue;
      if (seen.insert(child.key()).second) {
        all.push_back(child);
        frontier.emplace_back(std::move(child), d + 1);
      }
    }
  }
  out.configs_explored = static_cast<long>(all.size());
  for (const auto& c : all) {
    for (int p = 0; p < procs; ++p) {
      if (det.is_final(c.state[p])) continue;
      ++out.report.checked;
      OfConfig solo = c;
      long steps = 0;
      long prefix_with_scan = -1;
      long long ell_at_scan = -1;
      long long prev_ell = -1;
      bool ok = false;
      while (steps <= solo_budget) {
        int s = solo.state[p];
        if (det.is_final(s)) {
          ok = true;
          break;
        }
        bool was_scan = det.nu[s].is_scan;
        ndst_detail::of_step(det, solo, p);
        ++steps;
        if (was_scan && prefix_with_scan < 0) {
          prefix_with_scan = steps;
          ell_at_scan = info.ell[solo.state[p]];
          prev_ell = ell_at_scan;
          if (ell_at_scan == kNoSoloPath) {
            out.report.violation("post-scan state " + std::to_string(solo.state[p]) +
                                 " has no solo path");
            break;
          }
        } else if (prefix_with_scan >= 0) {
          long long now = det.is_final(solo.state[p]) ? 0 : info.ell[solo.state[p]];
          if (now != prev_ell - 1)
            out.report.violation("ell did not decrease by one at state " +
                                 std::to_string(solo.state[p]));
          prev_ell = now;
        }
      }
      if (!ok) {
        out.report.violation("solo run from a reachable configuration did not terminate (pid " +
                             std::to_string(p) + ")");
        continue;
      }
      out.max_solo_len = std::max(out.max_solo_len, steps);
      if (prefix_with_scan >= 0 && steps != prefix_with_scan + ell_at_scan)
        out.report.violation("solo run length " + std::to_string(steps) + " != prefix " +
                             std::to_string(prefix_with_scan) + " + ell " +
                             std::to_string(ell_at_scan));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ABA-free wrapping for register-valued protocols: every written value is
// tagged with the writer and a strictly increasing sequence number; scans
// strip the tags.
// ---------------------------------------------------------------------------

inline Value aba_strip(const Value& v) {
  size_t p = v.find('\x02');
  return p == std::string::npos ? v : v.substr(0, p);
}

inline ProtocolSpec aba_wrap(const ProtocolSpec& inner) {
  ProtocolSpec out = inner;
  out.init_state = [inner](int pid, const Value& input) {
    return "0\x01" + inner.init_state(pid, input);
  };
  auto split_state = [](const std::string& s) {
    size_t p = s.find('\x01');
    return std::pair<std::string, std::string>(s.substr(0, p), s.substr(p + 1));
  };
  out.next = [inner, split_state](int pid, const std::string& state) {
    auto [seq, is] = split_state(state);
    PoisedStep p = inner.next(pid, is);
    if (p.tag == StepTag::Update)
      p.value += '\x02' + std::to_string(pid) + '\x02' + seq;
    return p;
  };
  out.transition = [inner, split_state](int pid, const std::string& state,
                                        const StepResponse& resp) {
    auto [seq, is] = split_state(state);
    if (resp.is_scan) {
      StepResponse stripped = resp;
      for (auto& v : stripped.view) v = aba_strip(v);
      return seq + '\x01' + inner.transition(pid, is, stripped);
    }
    return std::to_string(std::stoll(seq) + 1) + '\x01' + inner.transition(pid, is, resp);
  };
  return out;
}

// Scans an execution for the forbidden pattern: a component returning to an
// earlier value after having changed.
inline Report check_aba_free(const ExecutionRecord& rec, int m,
                             const std::vector<Value>& initial) {
  Report rep;
  std::vector<Value> cur = initial;
  std::vector<std::set<Value>> retired(m);
  for (const auto& ev : rec.events) {
    if (ev.tag != StepTag::Update) continue;
    ++rep.checked;
    if (ev.value != cur[ev.comp]) {
      retired[ev.comp].insert(cur[ev.comp]);
      if (retired[ev.comp].count(ev.value))
        rep.violation("component " + std::to_string(ev.comp) + " returned to value " +
                      digest(ev.value));
      cur[ev.comp] = ev.value;
    }
  }
  return rep;
}

}  // namespace snaplab
