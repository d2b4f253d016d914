#include <doctest.h>

#include <sstream>

#include "snaplab/io.hpp"
#include "snaplab/ndst_toys.hpp"
#include "snaplab/stress.hpp"
#include "snaplab/zoo.hpp"

using namespace snaplab;

TEST_CASE("trace round-trips through the line format") {
  Rng rng(11);
  auto scripts = random_scripts(3, 2, 3, rng);
  Trace trace = run_scripts(3, 2, scripts, 11);
  std::ostringstream os;
  write_trace(os, trace);
  std::istringstream is(os.str());
  Trace back = read_trace(is);
  std::ostringstream os2;
  write_trace(os2, back);
  CHECK(os.str() == os2.str());
  CHECK(back.events.size() == trace.events.size());
  CHECK(back.ops.size() == trace.ops.size());
}

TEST_CASE("round-tripped traces check identically") {
  Rng rng(23);
  auto scripts = random_scripts(2, 2, 2, rng);
  Trace trace = run_scripts(2, 2, scripts, 23);
  std::ostringstream os;
  write_trace(os, trace);
  std::istringstream is(os.str());
  Trace back = read_trace(is);
  CHECK(check_all(back).ok() == check_all(trace).ok());
}

TEST_CASE("machine descriptions round-trip") {
  auto toy = adopt_insist_toy();
  std::ostringstream os;
  write_machine(os, toy.machine);
  std::istringstream is(os.str());
  NDMachine back = read_machine(is);
  std::ostringstream os2;
  write_machine(os2, back);
  CHECK(os.str() == os2.str());
  CHECK(back.num_states == toy.machine.num_states);
  CHECK(back.delta.size() == toy.machine.delta.size());
}

TEST_CASE("execution records serialize one event per line") {
  auto entry = starved_consensus();
  auto rr = run_schedule(entry.spec, {"a", "b"}, SchedulePolicy::explicit_order({0, 0, 0}), 3);
  std::ostringstream os;
  write_execution_record(os, rr.record);
  int lines = 0;
  std::istringstream is(os.str());
  std::string line;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 3);
}
