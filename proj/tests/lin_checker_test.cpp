#include <doctest.h>

#include "snaplab/brute_force.hpp"
#include "snaplab/lin_checker.hpp"
#include "snaplab/stress.hpp"

using namespace snaplab;

namespace {

Trace solo_block_trace() {
  AugWorld world(2, 2);
  world.begin_block_update(0, {0, 1}, {"a", "b"});
  while (!world.step(0)) {
  }
  return world.trace();
}

}  // namespace

TEST_CASE("solo block: all updates linearize at its append, in component order") {
  Trace trace = solo_block_trace();
  LinHistory hist = assign_points(trace);
  REQUIRE(hist.items.size() == 2);
  CHECK(hist.items[0].point == trace.ops[0].x_seq);
  CHECK(hist.items[1].point == trace.ops[0].x_seq);
  CHECK(hist.items[0].comp == 0);
  CHECK(hist.items[1].comp == 1);
}

TEST_CASE("solo scan linearizes at its final base scan") {
  AugWorld world(2, 2);
  world.begin_scan(0);
  while (!world.step(0)) {
  }
  LinHistory hist = assign_points(world.trace());
  REQUIRE(hist.items.size() == 1);
  CHECK(hist.items[0].is_scan);
  CHECK(hist.items[0].point == world.trace().ops[0].final_scan_seq);
}

TEST_CASE("yielding updates sit after their first scan and no later than their append") {
  AugWorld world(2, 2);
  int opb = world.begin_block_update(1, {1}, {"b"});
  world.step(1);
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  while (!world.step(1)) {
  }
  const Trace& trace = world.trace();
  REQUIRE(trace.ops[opb].yielded);
  LinHistory hist = assign_points(trace);
  for (const auto& it : hist.items) {
    if (it.is_scan || it.op_id != opb) continue;
    CHECK(it.point > trace.ops[opb].h_seq);
    CHECK(it.point <= trace.ops[opb].x_seq);
  }
  CHECK(check_yield_cause(trace).ok());
  CHECK(check_scan_semantics(hist, 2).ok());
  CHECK(check_block_semantics(hist, trace).ok());
}

TEST_CASE("empty history: a single fresh scan must return bottoms") {
  AugWorld world(1, 2);
  world.begin_scan(0);
  while (!world.step(0)) {
  }
  auto fc = check_all(world.trace());
  CHECK(fc.ok());
}

TEST_CASE("update then scan sees the write") {
  AugWorld world(2, 2);
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  world.begin_scan(1);
  while (!world.step(1)) {
  }
  auto hist = assign_points(world.trace());
  CHECK(check_scan_semantics(hist, 2).ok());
}

TEST_CASE("no yields: yield-cause check passes vacuously") {
  Trace trace = solo_block_trace();
  auto rep = check_yield_cause(trace);
  CHECK(rep.ok());
  CHECK(rep.checked == 0);
}

TEST_CASE("seeded stress corpus passes every rule-based check") {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    int f = 2 + static_cast<int>(seed % 3);
    int m = 1 + static_cast<int>(seed % 3);
    Rng rng(seed * 31 + 5);
    auto scripts = random_scripts(f, m, 3, rng);
    Trace trace = run_scripts(f, m, scripts, seed);
    auto fc = check_all(trace);
    if (!fc.ok()) {
      for (const auto& v : fc.merged().violations) MESSAGE(v);
    }
    REQUIRE(fc.ok());
  }
}

TEST_CASE("brute force: single fresh scan is linearizable") {
  AugWorld world(1, 2);
  world.begin_scan(0);
  while (!world.step(0)) {
  }
  CHECK(brute_force_linearizable(world.trace()));
}

TEST_CASE("brute force: a scan returning a never-written value is not linearizable") {
  AugWorld world(2, 2);
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  world.begin_scan(1);
  while (!world.step(1)) {
  }
  Trace corrupted = world.trace();
  for (auto& op : corrupted.ops)
    if (op.kind == AugOpKind::Scan) (*op.result_view)[0] = Value("never-written");
  CHECK_FALSE(brute_force_linearizable(corrupted));
  CHECK_FALSE(check_all(corrupted).ok());
  CHECK(brute_force_linearizable(world.trace()));
}

TEST_CASE("brute force refuses oversized traces") {
  AugWorld world(2, 3);
  world.begin_block_update(0, {0, 1, 2}, {"a", "b", "c"});
  while (!world.step(0)) {
  }
  world.begin_block_update(1, {0, 1, 2}, {"d", "e", "f"});
  while (!world.step(1)) {
  }
  CHECK_THROWS_AS(brute_force_linearizable(world.trace(), 4), Error);
}

TEST_CASE("pending operations at trace end follow the drop rules") {
  AugWorld world(2, 2);
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  // q1's block stops right after its append executed; q1's scan never begins
  world.begin_block_update(1, {1}, {"b"});
  world.step(1);  // base scan
  world.step(1);  // append
  const Trace& trace = world.trace();
  REQUIRE_FALSE(trace.ops[1].complete);
  REQUIRE(trace.ops[1].x_seq >= 0);
  LinHistory hist = assign_points(trace);
  // q0's update + q1's update-with-executed-append are present
  int updates = 0;
  for (const auto& it : hist.items)
    if (!it.is_scan) ++updates;
  CHECK(updates == 2);
  CHECK(check_scan_semantics(hist, 2).ok());
  CHECK(check_block_semantics(hist, trace).ok());
  CHECK(brute_force_linearizable(trace));

  // a block that never reached its append is dropped entirely
  AugWorld w2(2, 2);
  w2.begin_block_update(0, {0}, {"a"});
  w2.step(0);  // only the base scan
  LinHistory h2 = assign_points(w2.trace());
  CHECK(h2.items.empty());
  CHECK(brute_force_linearizable(w2.trace()));
}

TEST_CASE("oracle agrees with rule-based checks on small interleaved worlds") {
  std::vector<std::vector<Script>> cases = {
      {{ScriptOp::scan()}, {ScriptOp::block({0}, {"a"})}},
      {{ScriptOp::block({0, 1}, {"a", "b"})}, {ScriptOp::block({1}, {"c"})}},
      {{ScriptOp::block({0}, {"a"}), ScriptOp::scan()}, {ScriptOp::block({0}, {"b"})}},
  };
  for (const auto& scripts : cases) {
    int checked = 0;
    for_each_interleaving(2, 2, scripts, [&](const Trace& trace) {
      bool rules = check_all(trace).ok();
      bool oracle = brute_force_linearizable(trace, 8);
      CHECK(rules == oracle);
      CHECK(rules);
      ++checked;
    });
    CHECK(checked > 0);
  }
}
