#pragma once

#include <functional>
#include <vector>

#include "snaplab/aug_snapshot.hpp"
#include "snaplab/common.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// Script-driven worlds for exercising the augmented snapshot outside the
// simulation: each process runs a fixed list of operations under a seeded or
// exhaustively enumerated interleaving.
// ---------------------------------------------------------------------------

struct ScriptOp {
  bool is_scan = true;
  std::vector<int> comps;
  std::vector<Value> values;

  static ScriptOp scan() { return {true, {}, {}}; }
  static ScriptOp block(std::vector<int> comps, std::vector<Value> values) {
    return {false, std::move(comps), std::move(values)};
  }
};

using Script = std::vector<ScriptOp>;

namespace stress_detail {

struct Driver {
  AugWorld world;
  std::vector<Script> scripts;
  std::vector<size_t> cursor;

  Driver(int f, int m, std::vector<Script> s)
      : world(f, m), scripts(std::move(s)), cursor(scripts.size(), 0) {}

  bool has_work(int i) const {
    return world.busy(i) || cursor[i] < scripts[i].size();
  }

  void advance(int i) {
    if (!world.busy(i)) {
      const ScriptOp& op = scripts[i][cursor[i]++];
      if (op.is_scan)
        world.begin_scan(i);
      else
        world.begin_block_update(i, op.comps, op.values);
    }
    world.step(i);
  }

  std::vector<int> workers() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(scripts.size()); ++i)
      if (has_work(i)) out.push_back(i);
    return out;
  }
};

}  // namespace stress_detail

// Runs the scripts to completion under a seeded uniform scheduler.
inline Trace run_scripts(int f, int m, const std::vector<Script>& scripts, uint64_t seed) {
  stress_detail::Driver drv(f, m, scripts);
  Rng rng(seed);
  while (true) {
    auto w = drv.workers();
    if (w.empty()) break;
    drv.advance(w[rng.pick(static_cast<int>(w.size()))]);
  }
  return drv.world.trace();
}

// Enumerates every interleaving of the scripts' base steps, invoking the
// visitor on each completed trace. Exponential; desk scale only.
inline void for_each_interleaving(int f, int m, const std::vector<Script>& scripts,
                                  const std::function<void(const Trace&)>& visit) {
  std::function<void(const stress_detail::Driver&)> go = [&](const stress_detail::Driver& drv) {
    auto w = drv.workers();
    if (w.empty()) {
      visit(drv.world.trace());
      return;
    }
    for (int i : w) {
      stress_detail::Driver child = drv;
      child.advance(i);
      go(child);
    }
  };
  go(stress_detail::Driver(f, m, scripts));
}

// A seeded random mixed-operation corpus world.
inline std::vector<Script> random_scripts(int f, int m, int max_ops, Rng& rng) {
  std::vector<Script> scripts(f);
  for (int i = 0; i < f; ++i) {
    int ops = 1 + rng.pick(max_ops);
    for (int k = 0; k < ops; ++k) {
      if (rng.pick(100) < 40) {
        scripts[i].push_back(ScriptOp::scan());
      } else {
        int width = 1 + rng.pick(m);
        std::vector<int> comps;
        for (int c = 0; c < m; ++c) comps.push_back(c);
        for (int c = m - 1; c > 0; --c) std::swap(comps[c], comps[rng.pick(c + 1)]);
        comps.resize(width);
        std::vector<Value> values;
        for (int g = 0; g < width; ++g)
          values.push_back("q" + std::to_string(i) + "o" + std::to_string(k) + "g" +
                           std::to_string(g));
        scripts[i].push_back(ScriptOp::block(comps, values));
      }
    }
  }
  return scripts;
}

}  // namespace snaplab
