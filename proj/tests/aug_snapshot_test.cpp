#include <doctest.h>

#include <set>

#include "snaplab/aug_snapshot.hpp"
#include "snaplab/lin_checker.hpp"
#include "snaplab/stress.hpp"

using namespace snaplab;

namespace {

int steps_of(const Trace& trace, int op_id) {
  int n = 0;
  for (const auto& ev : trace.events)
    if (ev.op_id == op_id) ++n;
  return n;
}

}  // namespace

TEST_CASE("new_timestamp bumps the caller's entry") {
  SwSnapshot snap(3);
  auto h = snap.scan();
  CHECK(new_timestamp(h, 0).v == std::vector<int>{1, 0, 0});
  CHECK(new_timestamp(h, 2).v == std::vector<int>{0, 0, 1});
  // counts (2,0,1): two appends by 0, one by 2
  snap.update(0, {{{0, "a", Timestamp{{1, 0, 0}}}}, {}});
  snap.update(0, {{{0, "b", Timestamp{{2, 0, 0}}}}, {}});
  snap.update(2, {{{1, "c", Timestamp{{2, 0, 1}}}}, {}});
  CHECK(new_timestamp(snap.scan(), 1).v == std::vector<int>{2, 1, 1});
}

TEST_CASE("get_view picks the lexicographically largest timestamp per component") {
  SwSnapshot snap(2);
  CHECK(get_view(snap.scan(), 2) == ViewB{std::nullopt, std::nullopt});
  snap.update(0, {{{0, "a", Timestamp{{1, 0}}}}, {}});
  snap.update(0, {{{0, "c", Timestamp{{2, 0}}}}, {}});
  snap.update(1, {{{1, "b", Timestamp{{0, 1}}}}, {}});
  auto v = get_view(snap.scan(), 2);
  REQUIRE(v[0].has_value());
  CHECK(*v[0] == "c");
  CHECK(*v[1] == "b");
}

TEST_CASE("get_view: (1,0) beats (0,2) lexicographically") {
  SwSnapshot snap(2);
  snap.update(0, {{{0, "a", Timestamp{{1, 0}}}}, {}});
  snap.update(1, {{{0, "b", Timestamp{{0, 2}}}}, {}});
  auto v = get_view(snap.scan(), 1);
  CHECK(*v[0] == "a");
}

TEST_CASE("get_view rejects duplicate timestamps on one component") {
  SwSnapshot snap(2);
  snap.update(0, {{{0, "a", Timestamp{{1, 0}}}}, {}});
  snap.update(1, {{{0, "b", Timestamp{{1, 0}}}}, {}});
  CHECK_THROWS_AS(get_view(snap.scan(), 1), Error);
}

TEST_CASE("solo Scan on a fresh object: bottoms in exactly 3 base steps") {
  AugWorld world(2, 2);
  int op = world.begin_scan(0);
  int steps = 0;
  while (!world.step(0)) ++steps;
  ++steps;
  CHECK(steps == 3);
  auto res = world.result(op);
  CHECK(res.view == ViewB{std::nullopt, std::nullopt});
}

TEST_CASE("solo Block-Update on a fresh object returns the initial view in 6 steps") {
  AugWorld world(2, 2);
  int op = world.begin_block_update(0, {0}, {"a"});
  int steps = 0;
  while (!world.step(0)) ++steps;
  ++steps;
  CHECK(steps == 6);
  auto res = world.result(op);
  CHECK_FALSE(res.yielded);
  CHECK(res.view == ViewB{std::nullopt, std::nullopt});
}

TEST_CASE("Scan after a completed Block-Update sees the written value") {
  AugWorld world(2, 2);
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  int op = world.begin_scan(1);
  while (!world.step(1)) {
  }
  auto res = world.result(op);
  CHECK(res.view == ViewB{Value("a"), std::nullopt});
}

TEST_CASE("sequential Block-Updates: the second sees the first") {
  AugWorld world(2, 2);
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  int op = world.begin_block_update(1, {1}, {"b"});
  while (!world.step(1)) {
  }
  auto res = world.result(op);
  CHECK_FALSE(res.yielded);
  CHECK(res.view == ViewB{Value("a"), std::nullopt});
}

TEST_CASE("canonical yield interleaving: lower id interferes, higher id yields in 5 steps") {
  AugWorld world(2, 2);
  int opb = world.begin_block_update(1, {1}, {"b"});
  world.step(1);  // q1's first base scan
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  bool done = false;
  int more = 0;
  while (!done) {
    done = world.step(1);
    ++more;
  }
  CHECK(more == 4);  // 5 steps total on the yield path
  auto res = world.result(opb);
  CHECK(res.yielded);
  CHECK(steps_of(world.trace(), opb) == 5);
}

TEST_CASE("Scan with one interfering append completes in 5 steps") {
  AugWorld world(2, 2);
  int op = world.begin_scan(1);
  world.step(1);  // first base scan
  world.begin_block_update(0, {0}, {"x"});
  world.step(0);  // q0 base scan
  world.step(0);  // q0 append lands
  int steps = 1;
  bool done = false;
  while (!done) {
    done = world.step(1);
    ++steps;
  }
  CHECK(steps == 5);
  CHECK(world.op(op).failures == 1);
}

TEST_CASE("two scans with no intervening block return equal views") {
  AugWorld world(2, 2);
  world.begin_block_update(0, {0}, {"a"});
  while (!world.step(0)) {
  }
  int s1 = world.begin_scan(1);
  while (!world.step(1)) {
  }
  int s2 = world.begin_scan(1);
  while (!world.step(1)) {
  }
  CHECK(world.result(s1).view == world.result(s2).view);
}

TEST_CASE("block updates reject bad component lists") {
  AugWorld world(2, 2);
  CHECK_THROWS_AS(world.begin_block_update(0, {}, {}), Error);
  CHECK_THROWS_AS(world.begin_block_update(0, {0, 0}, {"a", "b"}), Error);
  CHECK_THROWS_AS(world.begin_block_update(0, {0, 2}, {"a", "b"}), Error);
  CHECK_THROWS_AS(world.begin_block_update(0, {0}, {"a", "b"}), Error);
}

TEST_CASE("a helper's scan hands a block a newer view than its own first scan") {
  AugWorld world(3, 2);
  int opb = world.begin_block_update(0, {0}, {"a"});
  world.step(0);  // q0's first base scan: empty history
  world.begin_block_update(2, {1}, {"z"});
  while (!world.step(2)) {
  }
  // q1's Scan records its (newer) result into the helping register q0 reads
  world.begin_scan(1);
  while (!world.step(1)) {
  }
  while (!world.step(0)) {
  }
  auto res = world.result(opb);
  REQUIRE_FALSE(res.yielded);
  CHECK(res.view == ViewB{std::nullopt, Value("z")});
  CHECK(check_all(world.trace()).ok());
}

TEST_CASE("process 0 never yields under random interleaving") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed * 7919 + 1);
    auto scripts = random_scripts(3, 2, 3, rng);
    Trace trace = run_scripts(3, 2, scripts, seed);
    for (const auto& op : trace.ops)
      if (op.actor == 0 && op.kind == AugOpKind::BlockUpdate && op.complete)
        CHECK_FALSE(op.yielded);
  }
}

TEST_CASE("timestamps are unique per component and fresh against prior scans") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed + 1000);
    auto scripts = random_scripts(3, 3, 3, rng);
    Trace trace = run_scripts(3, 3, scripts, seed);
    std::set<std::pair<int, std::vector<int>>> seen;
    for (const auto& ev : trace.events)
      for (const auto& tri : ev.appended)
        CHECK(seen.insert({tri.comp, tri.ts.v}).second);
    // freshness: a block's timestamp dominates every triple visible at its
    // first base scan
    for (const auto& op : trace.ops) {
      if (op.kind != AugOpKind::BlockUpdate || op.x_seq < 0) continue;
      for (const auto& ev : trace.events) {
        if (ev.seq >= op.h_seq) break;
        for (const auto& tri : ev.appended) CHECK(tri.ts < op.ts);
      }
    }
  }
}
