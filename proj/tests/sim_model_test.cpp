#include <doctest.h>

#include "snaplab/sim_model.hpp"
#include "snaplab/zoo.hpp"

using namespace snaplab;

namespace {

// One-component write-once protocol: scan, write own input, scan, output what
// that scan shows.
ProtocolSpec tiny_protocol(int n, int m) {
  ProtocolSpec p;
  p.n = n;
  p.m = m;
  p.initial_values.assign(m, "");
  p.init_state = [](int, const Value& in) { return "s0|" + in; };
  p.next = [](int, const std::string& st) {
    if (st.rfind("s0|", 0) == 0) return PoisedStep::scan();
    if (st.rfind("w|", 0) == 0) return PoisedStep::update(0, st.substr(2));
    if (st.rfind("s1|", 0) == 0) return PoisedStep::scan();
    return PoisedStep::output(st.substr(2));
  };
  p.transition = [](int, const std::string& st, const StepResponse& resp) -> std::string {
    if (st.rfind("s0|", 0) == 0) return "w|" + st.substr(3);
    if (st.rfind("w|", 0) == 0) return "s1|" + st.substr(2);
    return "d|" + resp.view[0];
  };
  return p;
}

}  // namespace

TEST_CASE("apply_step: scan on fresh contents returns initial values") {
  auto p = tiny_protocol(1, 1);
  auto c = initial_configuration(p, {"a"});
  SimEvent ev = apply_step(c, 0, p);
  CHECK(ev.tag == StepTag::Scan);
  CHECK(c.procs[0].state == "w|a");
}

TEST_CASE("apply_step: update then scan sees last writer") {
  auto p = tiny_protocol(2, 1);
  auto c = initial_configuration(p, {"a", "b"});
  apply_step(c, 0, p);  // p0 scan
  apply_step(c, 1, p);  // p1 scan
  apply_step(c, 0, p);  // p0 writes a
  apply_step(c, 1, p);  // p1 writes b
  CHECK(c.contents[0] == "b");
  apply_step(c, 0, p);  // p0 final scan
  CHECK(c.procs[0].output.has_value());
  CHECK(*c.procs[0].output == "b");
}

TEST_CASE("apply_step: stepping a terminated process throws") {
  auto p = tiny_protocol(1, 1);
  auto c = initial_configuration(p, {"a"});
  for (int i = 0; i < 3; ++i) apply_step(c, 0, p);
  CHECK(c.procs[0].terminated());
  CHECK_THROWS_AS(apply_step(c, 0, p), Error);
}

TEST_CASE("apply_step: two updates without a scan violate alternation") {
  ProtocolSpec p;
  p.n = 1;
  p.m = 1;
  p.initial_values = {""};
  p.init_state = [](int, const Value&) { return "a"; };
  p.next = [](int, const std::string& st) {
    if (st == "a") return PoisedStep::scan();
    return PoisedStep::update(0, "x");  // forever: update, update, ...
  };
  p.transition = [](int, const std::string& st, const StepResponse&) -> std::string {
    return st == "a" ? "b" : "b";
  };
  auto c = initial_configuration(p, {"y"});
  apply_step(c, 0, p);
  CHECK_THROWS_AS(apply_step(c, 0, p), Error);
}

TEST_CASE("run_schedule: empty schedule yields zero events") {
  auto p = tiny_protocol(1, 1);
  auto rr = run_schedule(p, {"a"}, SchedulePolicy::explicit_order({}), 10);
  CHECK(rr.record.events.empty());
  CHECK_FALSE(rr.all_output);
}

TEST_CASE("run_schedule: solo run of an obstruction-free protocol outputs within budget") {
  auto entry = of_consensus(2);
  auto rr = run_schedule(entry.spec, {"5", "7"}, SchedulePolicy::explicit_order({0, 0, 0, 0, 0, 0, 0, 0}), 8);
  CHECK(rr.outputs[0].has_value());
  CHECK(*rr.outputs[0] == "5");
}

TEST_CASE("run_schedule: seeded round on zoo consensus validates") {
  auto entry = of_consensus(2);
  for (uint64_t seed = 0; seed < 30; ++seed) {
    auto rr = run_schedule(entry.spec, {"0", "1"}, SchedulePolicy::seeded(seed), 400);
    REQUIRE(rr.all_output);
    std::vector<Value> outs = {*rr.outputs[0], *rr.outputs[1]};
    CHECK(validate_task(entry.task, {"0", "1"}, outs));
  }
}

TEST_CASE("check_x_of: solo termination of zoo consensus from all shallow configs") {
  auto entry = of_consensus(2);
  auto configs = reachable_configs(entry.spec, {"0", "1"}, 6);
  for (const auto& c : configs) {
    for (int p = 0; p < 2; ++p) {
      if (c.procs[p].terminated()) continue;
      auto rep = check_x_of(entry.spec, c, {p}, {.budget = 64});
      CHECK(rep.ok);
    }
  }
}

TEST_CASE("check_x_of: contention livelock found for x=2") {
  auto entry = contention_livelock_toy();
  auto c = initial_configuration(entry.spec, {"0", "1"});
  auto rep = check_x_of(entry.spec, c, {0, 1}, {.budget = 40});
  CHECK_FALSE(rep.ok);
  CHECK(rep.livelock);
  // but each alone terminates
  for (int p = 0; p < 2; ++p) CHECK(check_x_of(entry.spec, c, {p}, {.budget = 40}).ok);
}

TEST_CASE("scan determinism: two scans with no intervening update return equal views") {
  // directly from semantics: contents only change on updates
  auto p = tiny_protocol(2, 1);
  auto c = initial_configuration(p, {"a", "b"});
  auto v1 = c.contents;
  apply_step(c, 0, p);  // p0 scan
  CHECK(c.contents == v1);
  apply_step(c, 1, p);  // p1 scan
  CHECK(c.contents == v1);
}
