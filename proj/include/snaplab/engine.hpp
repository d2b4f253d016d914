#pragma once

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "snaplab/aug_snapshot.hpp"
#include "snaplab/common.hpp"
#include "snaplab/sim_model.hpp"
#include "snaplab/task.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// The simulation: f real processes run a protocol designed for n processes
// over an m-component snapshot, through the augmented snapshot. Direct
// simulators drive one process step for step. Covering simulators drive m
// processes toward a full-width block update, revising the past of a process
// when a constructed block repeats a component set whose atomic view they
// hold. Every simulator is a resumable machine advanced one base step at a
// time by the scheduler.
// ---------------------------------------------------------------------------

struct SimulationSetup {
  int f = 2;
  int d = 0;  // direct simulators; covering ones have the smaller identifiers
  ProtocolSpec protocol;
  std::vector<Value> inputs;  // one per simulator
  long local_budget = 100000;
  long step_budget = 1000000;
};

inline std::vector<std::vector<int>> make_partition(const SimulationSetup& s) {
  const int m = s.protocol.m;
  if (s.f < 1 || s.d < 0 || s.d >= s.f) fail(Errc::BadParameters, "need 0 <= d < f");
  if (static_cast<int>(s.inputs.size()) != s.f)
    fail(Errc::BadParameters, "one input per simulator");
  long need = static_cast<long>(s.f - s.d) * m + s.d;
  if (need > s.protocol.n)
    fail(Errc::BadParameters, "(f-d)*m + d = " + std::to_string(need) + " exceeds n = " +
                                  std::to_string(s.protocol.n));
  std::vector<std::vector<int>> part(s.f);
  int next = 0;
  for (int i = 0; i < s.f - s.d; ++i)
    for (int g = 0; g < m; ++g) part[i].push_back(next++);
  for (int i = s.f - s.d; i < s.f; ++i) part[i].push_back(next++);
  return part;
}

// One locally simulated (hidden) step.
struct HiddenStep {
  bool is_scan = false;
  std::vector<Value> view;  // scan response
  int comp = -1;
  Value value;
};

struct RevisionRecord {
  int sim = -1;
  int slot = -1;  // 1-based slot of the revised process within its partition
  int abs_pid = -1;
  int source_block_op = -1;  // atomic block whose view seeded the revision
  int trigger_scan_op = -1;  // the base Scan right before the revision
  std::vector<HiddenStep> xi;
};

struct TailRecord {
  int sim = -1;
  std::vector<std::tuple<int, int, Value>> beta;  // (abs_pid, comp, value)
  int xi_pid = -1;
  std::vector<HiddenStep> xi;
  Value output;
};

struct OpDone {
  int sim = -1;
  std::vector<int> sim_pids;          // blocks: simulated pid per update
  std::vector<ProcState> post_states;  // partition states after completion
};

struct EngineLog {
  std::vector<std::optional<OpDone>> op_done;  // indexed by aug op id
  std::vector<RevisionRecord> revisions;
  std::vector<TailRecord> tails;
  std::vector<std::vector<ProcState>> final_states;  // per sim
  std::vector<std::map<int, size_t>> max_stored;     // per sim: level r -> max |A|
};

enum class RunStatus { Completed, BudgetExhausted };

class Engine {
 public:
  explicit Engine(SimulationSetup setup)
      : setup_(std::move(setup)), world_(setup_.f, setup_.protocol.m) {
    partition_ = make_partition(setup_);
    const auto& proto = setup_.protocol;
    sims_.resize(setup_.f);
    log_.final_states.resize(setup_.f);
    log_.max_stored.resize(setup_.f);
    for (int i = 0; i < setup_.f; ++i) {
      Sim& sim = sims_[i];
      sim.covering = i < setup_.f - setup_.d;
      for (int abs : partition_[i]) {
        ProcState ps;
        ps.state = proto.init_state(abs, setup_.inputs[i]);
        sim.states.push_back(ps);
      }
      if (sim.covering)
        for (int r = proto.m; r >= 2; --r) sim.stack.push_back(Frame{r, {}, std::nullopt});
    }
  }

  const SimulationSetup& setup() const { return setup_; }
  const AugWorld& world() const { return world_; }
  const EngineLog& log() const { return log_; }
  const std::vector<std::vector<int>>& partition() const { return partition_; }

  bool terminated(int i) const { return sims_.at(i).terminated; }
  const std::optional<Value>& output(int i) const { return sims_.at(i).output; }

  bool all_terminated() const {
    for (const auto& s : sims_)
      if (!s.terminated) return false;
    return true;
  }

  // Advance simulator i by one base step.
  void step(int i) {
    Sim& sim = sims_.at(i);
    if (sim.terminated) fail(Errc::BadParameters, "simulator already terminated");
    if (!world_.busy(i)) issue_next(i);
    int op = current_op_[i];
    if (world_.step(i)) handle_completion(i, op);
  }

  RunStatus run(uint64_t seed) {
    Rng rng(seed);
    while (!all_terminated()) {
      if (static_cast<long>(world_.trace().events.size()) >= setup_.step_budget)
        return RunStatus::BudgetExhausted;
      std::vector<int> active;
      for (int i = 0; i < setup_.f; ++i)
        if (!sims_[i].terminated) active.push_back(i);
      step(active[rng.pick(static_cast<int>(active.size()))]);
    }
    return RunStatus::Completed;
  }

 private:
  struct Block {
    std::vector<int> comps;
    std::vector<Value> values;
  };

  struct Stored {
    ViewB view;
    int block_op = -1;
  };

  struct Frame {
    int r = 0;
    std::map<std::vector<int>, Stored> stored;  // keyed by sorted component set
    std::optional<Block> pending;
  };

  struct Sim {
    bool covering = false;
    bool terminated = false;
    std::optional<Value> output;
    std::vector<ProcState> states;  // partition slot order
    std::vector<Frame> stack;       // frames r = m .. 2, innermost last
  };

  const ProtocolSpec& proto() const { return setup_.protocol; }

  PoisedStep poised(int i, int slot) const {
    return proto().next(partition_[i][slot], sims_[i].states[slot].state);
  }

  void transition_slot(int i, int slot, const StepResponse& resp) {
    Sim& sim = sims_[i];
    int abs = partition_[i][slot];
    sim.states[slot].state = proto().transition(abs, sim.states[slot].state, resp);
    PoisedStep after = proto().next(abs, sim.states[slot].state);
    if (after.tag == StepTag::Output) sim.states[slot].output = after.value;
  }

  std::vector<Value> effective(const ViewB& view) const {
    std::vector<Value> c = proto().initial_values;
    for (size_t j = 0; j < view.size(); ++j)
      if (view[j]) c[j] = *view[j];
    return c;
  }

  void issue_next(int i) {
    Sim& sim = sims_[i];
    if (!sim.covering) {
      PoisedStep p = poised(i, 0);
      if (p.tag == StepTag::Scan)
        current_op_[i] = world_.begin_scan(i);
      else if (p.tag == StepTag::Update)
        current_op_[i] = world_.begin_block_update(i, {p.comp}, {p.value});
      else
        fail(Errc::ProtocolMisbehavior, "direct simulator's process poised at output");
      return;
    }
    if (!sim.stack.empty() && sim.stack.back().pending) {
      const Block& b = *sim.stack.back().pending;
      current_op_[i] = world_.begin_block_update(i, b.comps, b.values);
      return;
    }
    current_op_[i] = world_.begin_scan(i);
  }

  void handle_completion(int i, int op) {
    Sim& sim = sims_[i];
    AugResult res = world_.result(op);
    const AugOpRec& rec = world_.op(op);
    OpDone done;
    done.sim = i;
    if (!sim.covering) {
      if (rec.kind == AugOpKind::Scan) {
        transition_slot(i, 0, StepResponse::scan(effective(res.view)));
        if (sim.states[0].output) terminate(i, *sim.states[0].output);
      } else {
        done.sim_pids = {partition_[i][0]};
        transition_slot(i, 0, StepResponse::update());
        if (poised_tag_misbehaves(i, 0)) fail(Errc::ProtocolMisbehavior, "update not followed by scan");
      }
      done.post_states = sim.states;
      record_done(op, std::move(done));
      return;
    }
    if (rec.kind == AugOpKind::BlockUpdate) {
      Frame& fr = sim.stack.back();
      Block b = *fr.pending;
      for (size_t g = 0; g < b.comps.size(); ++g) {
        done.sim_pids.push_back(partition_[i][g]);
        transition_slot(i, static_cast<int>(g), StepResponse::update());
      }
      if (!res.yielded) {
        std::vector<int> key = b.comps;
        std::sort(key.begin(), key.end());
        fr.stored.emplace(key, Stored{res.view, op});
        size_t& mx = log_.max_stored[i][fr.r];
        if (fr.stored.size() > mx) mx = fr.stored.size();
      }
      fr.pending.reset();
      for (int r = fr.r - 1; r >= 2; --r) sim.stack.push_back(Frame{r, {}, std::nullopt});
      done.post_states = sim.states;
      record_done(op, std::move(done));
      return;
    }
    // A base Scan simulating p_{i,1}'s scan.
    transition_slot(i, 0, StepResponse::scan(effective(res.view)));
    if (sim.states[0].output) {
      terminate(i, *sim.states[0].output);
    } else {
      PoisedStep p = poised(i, 0);
      if (p.tag != StepTag::Update) fail(Errc::ProtocolMisbehavior, "scan not followed by update");
      process_return(i, Block{{p.comp}, {p.value}}, op);
    }
    done.post_states = sim.states;
    record_done(op, std::move(done));
  }

  bool poised_tag_misbehaves(int i, int slot) {
    if (sims_[i].states[slot].output) return false;
    return poised(i, slot).tag != StepTag::Scan;
  }

  // A constructed block ascends the frame stack: on a repeated component set
  // the past of the next process is revised with the stored view; otherwise
  // the block is scheduled as the frame's next Block-Update.
  void process_return(int i, Block b, int trigger_op) {
    Sim& sim = sims_[i];
    while (true) {
      if (static_cast<int>(b.comps.size()) == proto().m) {
        do_tail(i, b);
        return;
      }
      Frame& fr = sim.stack.back();
      std::vector<int> key = b.comps;
      std::sort(key.begin(), key.end());
      auto it = fr.stored.find(key);
      if (it == fr.stored.end()) {
        fr.pending = std::move(b);
        return;
      }
      std::optional<PoisedStep> fresh = revise(i, fr.r, it->second, key, trigger_op);
      if (!fresh) return;  // revised process output; simulator terminated
      b.comps.push_back(fresh->comp);
      b.values.push_back(fresh->value);
      sim.stack.pop_back();
    }
  }

  // Locally simulate p_{i,r} from its current state with the stored view as
  // contents, until it is poised to update a fresh component or outputs.
  std::optional<PoisedStep> revise(int i, int r, const Stored& stored,
                                   const std::vector<int>& covered, int trigger_op) {
    Sim& sim = sims_[i];
    int slot = r - 1;
    int abs = partition_[i][slot];
    if (sim.states[slot].output)
      fail(Errc::ProtocolMisbehavior, "revised process already terminated");
    if (poised(i, slot).tag != StepTag::Scan)
      fail(Errc::ProtocolMisbehavior, "revised process not poised at a scan");
    std::set<int> allowed(covered.begin(), covered.end());
    std::vector<Value> c = effective(stored.view);
    RevisionRecord rev;
    rev.sim = i;
    rev.slot = r;
    rev.abs_pid = abs;
    rev.source_block_op = stored.block_op;
    rev.trigger_scan_op = trigger_op;
    for (long steps = 0;; ++steps) {
      if (steps > setup_.local_budget)
        fail(Errc::LocalSimBudgetExceeded, "revision of pid " + std::to_string(abs));
      PoisedStep p = poised(i, slot);
      if (p.tag == StepTag::Scan) {
        rev.xi.push_back({true, c, -1, {}});
        transition_slot(i, slot, StepResponse::scan(c));
        if (sim.states[slot].output) {
          Value y = *sim.states[slot].output;
          log_.revisions.push_back(std::move(rev));
          terminate(i, y);
          return std::nullopt;
        }
        continue;
      }
      if (p.tag != StepTag::Update) fail(Errc::ProtocolMisbehavior, "unexpected poised step");
      if (!allowed.count(p.comp)) {
        log_.revisions.push_back(std::move(rev));
        return p;  // poised at a fresh component
      }
      rev.xi.push_back({false, {}, p.comp, p.value});
      c[p.comp] = p.value;
      transition_slot(i, slot, StepResponse::update());
    }
  }

  // Full-width block constructed: locally run it plus p_{i,1}'s terminating
  // solo execution, restore the states, and output.
  void do_tail(int i, const Block& b) {
    Sim& sim = sims_[i];
    const int m = proto().m;
    std::vector<ProcState> saved = sim.states;
    TailRecord tail;
    tail.sim = i;
    std::vector<Value> c = proto().initial_values;
    for (size_t g = 0; g < b.comps.size(); ++g) {
      int slot = static_cast<int>(g);
      PoisedStep p = poised(i, slot);
      if (!(p.tag == StepTag::Update && p.comp == b.comps[g] && p.value == b.values[g]))
        fail(Errc::ProtocolMisbehavior, "constructed block does not match poised updates");
      tail.beta.emplace_back(partition_[i][slot], b.comps[g], b.values[g]);
      c[b.comps[g]] = b.values[g];
      transition_slot(i, slot, StepResponse::update());
    }
    (void)m;
    tail.xi_pid = partition_[i][0];
    Value y;
    for (long steps = 0;; ++steps) {
      if (steps > setup_.local_budget)
        fail(Errc::LocalSimBudgetExceeded, "solo tail of sim " + std::to_string(i));
      if (sim.states[0].output) {
        y = *sim.states[0].output;
        break;
      }
      PoisedStep p = poised(i, 0);
      if (p.tag == StepTag::Scan) {
        tail.xi.push_back({true, c, -1, {}});
        transition_slot(i, 0, StepResponse::scan(c));
      } else if (p.tag == StepTag::Update) {
        tail.xi.push_back({false, {}, p.comp, p.value});
        c[p.comp] = p.value;
        transition_slot(i, 0, StepResponse::update());
      } else {
        fail(Errc::ProtocolMisbehavior, "unexpected poised step in tail");
      }
    }
    tail.output = y;
    sim.states = std::move(saved);
    log_.tails.push_back(std::move(tail));
    terminate(i, y);
  }

  void terminate(int i, const Value& y) {
    Sim& sim = sims_[i];
    sim.terminated = true;
    sim.output = y;
    log_.final_states[i] = sim.states;
  }

  void record_done(int op, OpDone done) {
    if (static_cast<size_t>(op) >= log_.op_done.size()) log_.op_done.resize(op + 1);
    log_.op_done[op] = std::move(done);
  }

  SimulationSetup setup_;
  AugWorld world_;
  std::vector<std::vector<int>> partition_;
  std::vector<Sim> sims_;
  EngineLog log_;
  std::map<int, int> current_op_;
};

}  // namespace snaplab
