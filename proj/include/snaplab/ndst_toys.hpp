#pragma once

#include <map>

#include "snaplab/ndst.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// Bundled machines for the transformation: a genuinely nondeterministic
// solo-terminating two-process machine over one register, and a non-NDST
// negative control.
// ---------------------------------------------------------------------------

// Adopt-or-insist over a single register with values {"", "0", "1"}.
// From a scan state Try(x, e): blank means write your own value; seeing your
// own value means finish; seeing the other value forks nondeterministically
// between ceding to it and insisting on your own. Every state has a forced
// solo path to a final state, so the machine is NDST; the fork gives the
// derivation real choices, including an equal-length tie.
struct AdoptInsistToy {
  NDMachine machine;
  int try_state[2][3] = {};   // [x][e] with e in {blank, "0", "1"}
  int put_state[2][3] = {};
  int cede_state[2] = {};
  int fin_state[2] = {};

  static int eidx(const Value& v) { return v.empty() ? 0 : (v == "0" ? 1 : 2); }
  static Value eval(int e) { return e == 0 ? "" : (e == 1 ? "0" : "1"); }

  int initial_state(int input) const { return try_state[input][0]; }
};

inline AdoptInsistToy adopt_insist_toy() {
  AdoptInsistToy toy;
  NDMachine& m = toy.machine;
  m.m = 1;
  m.initial_values = {""};
  auto add_state = [&](const std::vector<Value>& expected) {
    m.expected.push_back(expected);
    m.final_output.emplace_back();
    m.nu.emplace_back();
    m.delta_default.emplace_back();
    return m.num_states++;
  };
  for (int x = 0; x < 2; ++x)
    for (int e = 0; e < 3; ++e) toy.try_state[x][e] = add_state({AdoptInsistToy::eval(e)});
  for (int x = 0; x < 2; ++x)
    for (int e = 0; e < 3; ++e) toy.put_state[x][e] = add_state({AdoptInsistToy::eval(e)});
  for (int w = 0; w < 2; ++w) toy.cede_state[w] = add_state({int_value(w)});
  for (int w = 0; w < 2; ++w) toy.fin_state[w] = add_state({int_value(w)});

  for (int x = 0; x < 2; ++x) {
    for (int e = 0; e < 3; ++e) {
      int s = toy.try_state[x][e];
      m.nu[s] = {true, -1, {}};
      m.delta[{s, NDMachine::view_key({""})}] = {toy.put_state[x][0]};
      for (int w = 0; w < 2; ++w) {
        std::string key = NDMachine::view_key({int_value(w)});
        if (w == x)
          m.delta[{s, key}] = {toy.fin_state[x]};
        else
          m.delta[{s, key}] = {toy.cede_state[w], toy.put_state[x][AdoptInsistToy::eidx(int_value(w))]};
      }
      m.delta_default[s] = {toy.put_state[x][0]};
    }
    for (int e = 0; e < 3; ++e) {
      int s = toy.put_state[x][e];
      m.nu[s] = {false, 0, {CompOp::Kind::Write, int_value(x)}};
      m.delta_default[s] = {toy.try_state[x][AdoptInsistToy::eidx(int_value(x))]};
    }
  }
  for (int w = 0; w < 2; ++w) {
    int s = toy.cede_state[w];
    m.nu[s] = {false, 0, {CompOp::Kind::Write, int_value(w)}};
    m.delta_default[s] = {toy.try_state[w][AdoptInsistToy::eidx(int_value(w))]};
  }
  for (int w = 0; w < 2; ++w) m.final_output[toy.fin_state[w]] = int_value(w);
  m.initial_states = {toy.initial_state(0), toy.initial_state(1)};
  m.validate();
  return toy;
}

// Never reaches a final state: its forced solo run alternates write and scan
// forever. Flags the non-solo-terminating path in the table.
inline NDMachine solo_loop_toy() {
  NDMachine m;
  m.m = 1;
  m.initial_values = {""};
  m.num_states = 2;
  m.final_output.resize(2);
  m.nu.resize(2);
  m.expected = {{""}, {"0"}};
  m.delta_default.resize(2);
  m.nu[0] = {false, 0, {CompOp::Kind::Write, "0"}};
  m.delta_default[0] = {1};
  m.nu[1] = {true, -1, {}};
  m.delta_default[1] = {0};
  m.validate();
  return m;
}

}  // namespace snaplab
