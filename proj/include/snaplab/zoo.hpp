#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "snaplab/common.hpp"
#include "snaplab/sim_model.hpp"
#include "snaplab/task.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// Concrete protocols exercising the engine. Component values and process
// states are encoded strings; fields are separated by \x1f.
// ---------------------------------------------------------------------------

struct ZooEntry {
  std::string name;
  std::string params;
  ProtocolSpec spec;
  ColorlessTask task;
  bool claimed_of = false;
  bool known_buggy = false;
};

namespace zoo_detail {

inline std::vector<std::string> split(const std::string& s, char sep = '\x1f') {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = s.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

inline std::string enc(std::initializer_list<std::string> parts) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += '\x1f';
    out += p;
    first = false;
  }
  return out;
}

struct RoundVal {
  long long r = 0;
  Value v;

  bool operator<(const RoundVal& o) const { return r != o.r ? r < o.r : v < o.v; }
  bool operator==(const RoundVal& o) const { return r == o.r && v == o.v; }

  std::string enc_comp() const { return std::to_string(r) + '\x1f' + v; }
  static RoundVal dec(const std::string& s) {
    auto parts = split(s);
    return {std::stoll(parts[0]), parts[1]};
  }
};

}  // namespace zoo_detail

// Obstruction-free consensus on n components for n processes. Each process
// races a (round, value) pair on its own component: it adopts the
// lexicographically largest pair it sees, advances its round while leading
// with its own pair published, and decides once it leads every other
// component by at least two rounds (components agreeing on its value are fine
// at any round). A sleeping process can hold back at most one write, which is
// at most one round ahead of its published component, so a two-round lead
// cannot be overtaken by a stale value.
inline ZooEntry of_consensus(int n) {
  using namespace zoo_detail;
  if (n < 1) fail(Errc::BadN, "of_consensus needs n >= 1");
  ZooEntry entry;
  entry.name = "of_consensus";
  entry.params = "n=" + std::to_string(n);
  entry.task = ColorlessTask::consensus();
  entry.claimed_of = true;
  ProtocolSpec& p = entry.spec;
  p.n = n;
  p.m = n;
  p.initial_values.assign(n, "");
  p.init_state = [](int, const Value& input) { return enc({"S", "1", input}); };
  p.next = [](int pid, const std::string& state) {
    auto f = split(state);
    if (f[0] == "D") return PoisedStep::output(f[1]);
    if (f[0] == "W") return PoisedStep::update(pid, f[1] + '\x1f' + f[2]);
    return PoisedStep::scan();
  };
  p.transition = [n](int pid, const std::string& state, const StepResponse& resp) {
    auto f = split(state);
    if (f[0] == "W") return enc({"S", f[1], f[2]});
    RoundVal mine{std::stoll(f[1]), f[2]};
    std::vector<std::optional<RoundVal>> comps(n);
    for (int j = 0; j < n; ++j)
      if (!resp.view[j].empty()) comps[j] = RoundVal::dec(resp.view[j]);
    for (int j = 0; j < n; ++j)
      if (comps[j] && mine < *comps[j]) mine = *comps[j];
    bool own_published = comps[pid] && *comps[pid] == mine;
    if (own_published && mine.r >= 2) {
      bool lead = true;
      for (int j = 0; j < n; ++j) {
        if (j == pid || !comps[j]) continue;
        if (comps[j]->v != mine.v && comps[j]->r > mine.r - 2) lead = false;
      }
      if (lead) return enc({"D", mine.v});
    }
    if (own_published) {
      bool top = true;
      for (int j = 0; j < n; ++j)
        if (comps[j] && mine < *comps[j]) top = false;
      if (top) mine.r += 1;
    }
    return enc({"W", std::to_string(mine.r), mine.v});
  };
  return entry;
}

// Space-starved consensus: m components shared by n processes (default the
// paper-scale 1-component, 2-process shape). Scan, adopt the largest value
// seen (own input if none), write it to a shared component, scan again and
// decide what that shows. Solo-terminating and wait-free, but contention
// splits decisions: the engine's demonstration target.
inline ZooEntry starved_consensus(int m = 1, int n = 2) {
  using namespace zoo_detail;
  if (m < 1 || n < 1) fail(Errc::BadParameters, "starved_consensus needs m, n >= 1");
  ZooEntry entry;
  entry.name = "starved_consensus";
  entry.params = "m=" + std::to_string(m) + ",n=" + std::to_string(n);
  entry.task = ColorlessTask::consensus();
  entry.claimed_of = true;
  entry.known_buggy = true;
  ProtocolSpec& p = entry.spec;
  p.n = n;
  p.m = m;
  p.initial_values.assign(m, "");
  p.init_state = [](int, const Value& input) { return enc({"A", input}); };
  p.next = [m](int pid, const std::string& state) {
    auto f = split(state);
    if (f[0] == "A" || f[0] == "C") return PoisedStep::scan();
    if (f[0] == "B") return PoisedStep::update(pid % m, f[1]);
    return PoisedStep::output(f[1]);
  };
  p.transition = [](int, const std::string& state, const StepResponse& resp) {
    auto f = split(state);
    if (f[0] == "B") return enc({"C", f[1]});
    Value best;
    for (const auto& c : resp.view)
      if (!c.empty() && c > best) best = c;
    if (f[0] == "A") return enc({"B", best.empty() ? f[1] : best});
    return enc({"D", best.empty() ? f[1] : best});  // after own write, never empty
  };
  return entry;
}

// k-set agreement with n-k+1 components: the first n-k+1 processes run the
// consensus race on them; the remaining k-1 processes scan once and output
// their own input. At most 1 + (k-1) = k distinct outputs.
inline ZooEntry kset_of(int n, int k) {
  using namespace zoo_detail;
  if (!(1 <= k && k < n)) fail(Errc::BadParameters, "kset_of needs 1 <= k < n");
  int m = n - k + 1;
  ZooEntry inner = of_consensus(m);
  ZooEntry entry;
  entry.name = "kset_of";
  entry.params = "n=" + std::to_string(n) + ",k=" + std::to_string(k);
  entry.task = ColorlessTask::k_set(k);
  entry.claimed_of = true;
  ProtocolSpec& p = entry.spec;
  ProtocolSpec racer = inner.spec;
  p.n = n;
  p.m = m;
  p.initial_values.assign(m, "");
  p.init_state = [racer, m](int pid, const Value& input) {
    if (pid < m) return racer.init_state(pid, input);
    return enc({"E", input});
  };
  p.next = [racer, m](int pid, const std::string& state) {
    if (pid < m) return racer.next(pid, state);
    auto f = split(state);
    if (f[0] == "E") return PoisedStep::scan();
    return PoisedStep::output(f[1]);
  };
  p.transition = [racer, m](int pid, const std::string& state, const StepResponse& resp) {
    if (pid < m) return racer.transition(pid, state, resp);
    auto f = split(state);
    return enc({"F", f[1]});
  };
  return entry;
}

// eps-approximate agreement on n components. Each process publishes its
// (round, value) pair on its own component before using it: a scan either
// adopts the smallest value at a newer round (an exact copy), or moves to the
// midpoint of the published values at its own round and advances. From the
// first published round on, any two values one round apart differ by at most
// half the previous spread, so ceil(log2(1/eps)) + 2 rounds suffice.
inline ZooEntry eps_agreement(int n, double eps) {
  using namespace zoo_detail;
  if (n < 1) fail(Errc::BadN, "eps_agreement needs n >= 1");
  if (!(eps > 0.0 && eps < 1.0)) fail(Errc::BadParameters, "eps must be in (0,1)");
  long long rounds = static_cast<long long>(std::ceil(std::log2(1.0 / eps))) + 2;
  ZooEntry entry;
  entry.name = "eps_agreement";
  entry.params = "n=" + std::to_string(n) + ",eps=" + real_value(eps);
  entry.task = ColorlessTask::eps_agreement(eps);
  entry.claimed_of = true;
  ProtocolSpec& p = entry.spec;
  p.n = n;
  p.m = n;
  p.initial_values.assign(n, "");
  p.init_state = [](int, const Value& input) { return enc({"S", "1", input}); };
  p.next = [](int pid, const std::string& state) {
    auto f = split(state);
    if (f[0] == "D") return PoisedStep::output(f[1]);
    if (f[0] == "W") return PoisedStep::update(pid, f[1] + '\x1f' + f[2]);
    return PoisedStep::scan();
  };
  p.transition = [rounds, n](int pid, const std::string& state, const StepResponse& resp) {
    auto f = split(state);
    if (f[0] == "W") return enc({"S", f[1], f[2]});
    long long r = std::stoll(f[1]);
    Value v = f[2];
    if (r >= rounds) return enc({"D", v});
    long long rmax = 0;
    for (int j = 0; j < n; ++j) {
      if (resp.view[j].empty()) continue;
      rmax = std::max(rmax, RoundVal::dec(resp.view[j]).r);
    }
    if (rmax > r) {
      // behind: copy the smallest value published at the newest round
      double lo = 0;
      bool have = false;
      for (int j = 0; j < n; ++j) {
        if (resp.view[j].empty()) continue;
        RoundVal rv = RoundVal::dec(resp.view[j]);
        if (rv.r != rmax) continue;
        double x = value_as_real(rv.v);
        if (!have || x < lo) lo = x;
        have = true;
      }
      return enc({"W", std::to_string(rmax), real_value(lo)});
    }
    bool published = !resp.view[pid].empty() && RoundVal::dec(resp.view[pid]).r == r;
    if (!published) return enc({"W", std::to_string(r), v});
    // at the frontier with our pair visible: midpoint of the round-r values
    double lo = value_as_real(v), hi = lo;
    for (int j = 0; j < n; ++j) {
      if (resp.view[j].empty()) continue;
      RoundVal rv = RoundVal::dec(resp.view[j]);
      if (rv.r != r) continue;
      double x = value_as_real(rv.v);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return enc({"W", std::to_string(r + 1), real_value((lo + hi) / 2.0)});
  };
  return entry;
}

// Terminates solo but livelocks under two-process contention: each process
// writes its own id and decides only after reading it back. A negative
// control for x-obstruction-freedom checking.
inline ZooEntry contention_livelock_toy() {
  using namespace zoo_detail;
  ZooEntry entry;
  entry.name = "contention_livelock_toy";
  entry.task = ColorlessTask::consensus();
  entry.claimed_of = true;
  entry.known_buggy = true;
  ProtocolSpec& p = entry.spec;
  p.n = 2;
  p.m = 1;
  p.initial_values.assign(1, "");
  p.init_state = [](int, const Value& input) { return enc({"S", input}); };
  p.next = [](int pid, const std::string& state) {
    auto f = split(state);
    if (f[0] == "D") return PoisedStep::output(f[1]);
    if (f[0] == "W") return PoisedStep::update(0, "me" + std::to_string(pid) + ":" + f[1]);
    return PoisedStep::scan();
  };
  p.transition = [](int pid, const std::string& state, const StepResponse& resp) {
    auto f = split(state);
    if (f[0] == "W") return enc({"S", f[1]});
    std::string tag = "me" + std::to_string(pid) + ":" + f[1];
    if (resp.view[0] == tag) return enc({"D", f[1]});
    return enc({"W", f[1]});
  };
  return entry;
}

struct ZooParams {
  int n = 2;
  int k = 1;
  int m = 1;
  double eps = 0.25;
};

inline ZooEntry zoo_lookup(const std::string& name, const ZooParams& params) {
  if (name == "of_consensus") return of_consensus(params.n);
  if (name == "starved_consensus") return starved_consensus(params.m, params.n);
  if (name == "kset_of") return kset_of(params.n, params.k);
  if (name == "eps_agreement") return eps_agreement(params.n, params.eps);
  if (name == "contention_livelock_toy") return contention_livelock_toy();
  fail(Errc::BadParameters, "unknown protocol: " + name);
}

inline std::vector<std::string> zoo_names() {
  return {"of_consensus", "starved_consensus", "kset_of", "eps_agreement",
          "contention_livelock_toy"};
}

}  // namespace snaplab
