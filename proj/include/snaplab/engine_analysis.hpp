#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "snaplab/engine.hpp"
#include "snaplab/lin_checker.hpp"
#include "snaplab/task.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// From a completed run: the intermediate execution (linearized operations
// annotated with simulated-process states), its block decomposition, the
// reconstructed simulated execution with hidden steps inserted, and a replay
// oracle that validates the reconstruction against the protocol semantics.
// ---------------------------------------------------------------------------

struct Intermediate {
  std::vector<LinOp> deltas;
  std::vector<int> delta_pid;                       // simulated process per delta
  std::vector<std::vector<Value>> contents;         // configs 0..N
  std::vector<std::vector<ProcState>> states;       // configs 0..N, indexed by abs pid
  Report violations;                                // next-step and scan-view checks
};

inline std::vector<Value> effective_view(const ViewB& view, const std::vector<Value>& initial) {
  std::vector<Value> c = initial;
  for (size_t j = 0; j < view.size(); ++j)
    if (view[j]) c[j] = *view[j];
  return c;
}

inline Intermediate intermediate_execution(const Engine& eng) {
  const Trace& trace = eng.world().trace();
  const EngineLog& log = eng.log();
  const SimulationSetup& setup = eng.setup();
  const auto& part = eng.partition();

  Intermediate inter;
  LinHistory hist = assign_points(trace);
  inter.deltas = hist.items;

  std::vector<Value> fan_inputs(setup.protocol.n, setup.inputs.empty() ? Value{} : setup.inputs[0]);
  for (int i = 0; i < setup.f; ++i)
    for (int abs : part[i]) fan_inputs[abs] = setup.inputs[i];
  Configuration c0 = initial_configuration(setup.protocol, fan_inputs);

  inter.contents.push_back(c0.contents);
  inter.states.push_back(c0.procs);

  for (size_t k = 0; k < inter.deltas.size(); ++k) {
    const LinOp& d = inter.deltas[k];
    if (static_cast<size_t>(d.op_id) >= log.op_done.size() || !log.op_done[d.op_id])
      fail(Errc::MalformedTrace, "operation " + std::to_string(d.op_id) + " has no engine record");
    const OpDone& od = *log.op_done[d.op_id];
    int sim = od.sim;
    std::vector<Value> contents = inter.contents.back();
    std::vector<ProcState> states = inter.states.back();
    int pid = -1;
    if (d.is_scan) {
      pid = part[sim][0];
      // next-step: the simulated process is poised at a scan here
      if (states[pid].output)
        inter.violations.violation("delta " + std::to_string(k) + ": pid " + std::to_string(pid) +
                                   " already terminated");
      else if (setup.protocol.next(pid, states[pid].state).tag != StepTag::Scan)
        inter.violations.violation("delta " + std::to_string(k) + ": pid " + std::to_string(pid) +
                                   " not poised at scan");
      // the view handed to the process equals the contents here
      if (effective_view(d.view, setup.protocol.initial_values) != contents)
        inter.violations.violation("delta " + std::to_string(k) + ": scan view differs from contents");
      for (size_t s = 0; s < part[sim].size(); ++s) states[part[sim][s]] = od.post_states[s];
    } else {
      const AugOpRec& op = eng.world().op(d.op_id);
      int g = -1;
      for (size_t gg = 0; gg < op.comps.size(); ++gg)
        if (op.comps[gg] == d.comp) g = static_cast<int>(gg);
      if (g < 0) fail(Errc::MalformedTrace, "update component not in its block");
      pid = od.sim_pids.at(g);
      if (states[pid].output)
        inter.violations.violation("delta " + std::to_string(k) + ": pid " + std::to_string(pid) +
                                   " already terminated");
      else {
        PoisedStep p = setup.protocol.next(pid, states[pid].state);
        if (!(p.tag == StepTag::Update && p.comp == d.comp && p.value == d.value))
          inter.violations.violation("delta " + std::to_string(k) + ": pid " + std::to_string(pid) +
                                     " not poised at update(" + std::to_string(d.comp) + ")");
      }
      contents[d.comp] = d.value;
      int slot = -1;
      for (size_t s = 0; s < part[sim].size(); ++s)
        if (part[sim][s] == pid) slot = static_cast<int>(s);
      states[pid] = od.post_states.at(slot);
    }
    inter.delta_pid.push_back(pid);
    inter.contents.push_back(std::move(contents));
    inter.states.push_back(std::move(states));
    ++inter.violations.checked;
  }
  return inter;
}

struct DecompBlock {
  int op_id = -1;
  int sim = -1;
  long t_pos = -1;   // config index of the view point T
  long z_pos = -1;   // delta index of the first update
  long len = 0;      // number of updates
};

struct BlockDecomposition {
  std::vector<DecompBlock> blocks;  // alpha_t = [prev_end, t_pos), gamma_t = [t_pos, z_pos)
  Report violations;
};

inline BlockDecomposition block_decomposition(const Engine& eng, const Intermediate& inter) {
  const Trace& trace = eng.world().trace();
  BlockDecomposition out;
  std::map<int, std::pair<long, long>> runs;  // op -> (first delta, count)
  for (size_t k = 0; k < inter.deltas.size(); ++k) {
    const LinOp& d = inter.deltas[k];
    if (d.is_scan || !d.parent_atomic) continue;
    auto it = runs.find(d.op_id);
    if (it == runs.end())
      runs[d.op_id] = {static_cast<long>(k), 1};
    else
      it->second.second += 1;
  }
  std::vector<DecompBlock> blocks;
  for (const auto& [op_id, run] : runs) {
    DecompBlock b;
    b.op_id = op_id;
    b.sim = trace.ops[op_id].actor;
    b.z_pos = run.first;
    b.len = run.second;
    blocks.push_back(b);
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const DecompBlock& a, const DecompBlock& b) { return a.z_pos < b.z_pos; });
  long prev_end = 0;
  for (auto& b : blocks) {
    const AugOpRec& op = trace.ops[b.op_id];
    for (long k = b.z_pos; k < b.z_pos + b.len; ++k) {
      if (k >= static_cast<long>(inter.deltas.size()) || inter.deltas[k].op_id != b.op_id) {
        out.violations.violation("block op " + std::to_string(b.op_id) + " updates not contiguous");
        break;
      }
    }
    std::vector<Value> want =
        effective_view(*op.result_view, eng.setup().protocol.initial_values);
    b.t_pos = -1;
    for (long p = prev_end; p <= b.z_pos && b.t_pos < 0; ++p) {
      if (inter.contents[p] != want) continue;
      bool clean = true;
      for (long k = p; k < b.z_pos; ++k) {
        const LinOp& d = inter.deltas[k];
        if (d.is_scan || d.parent_atomic) {
          clean = false;
          break;
        }
      }
      if (clean) b.t_pos = p;
    }
    if (b.t_pos < 0)
      out.violations.violation("block op " + std::to_string(b.op_id) +
                               " has no valid view point in its decomposition slot");
    else
      prev_end = b.z_pos + b.len;
    ++out.violations.checked;
  }
  out.blocks = std::move(blocks);
  return out;
}

enum class SegKind { Alpha, Zeta, Gamma, Beta, TailBeta, TailXi };

struct SimStep {
  int pid = -1;
  StepTag tag = StepTag::Scan;
  int comp = -1;
  Value value;
  std::vector<Value> view;  // recorded scan response
  SegKind seg = SegKind::Alpha;
  long delta_index = -1;  // for steps imaging a linearized operation
};

struct SimExecution {
  std::vector<SimStep> steps;
};

// Builds the simulated execution: the image of every linearized operation,
// with each revision's hidden steps inserted immediately before the gamma/beta
// segment of its source block, and each finishing covering simulator's local
// block-plus-solo tail appended at the end.
inline SimExecution reconstruct(const Engine& eng, const Intermediate& inter,
                                const BlockDecomposition& decomp) {
  const EngineLog& log = eng.log();
  SimExecution out;
  std::map<int, const RevisionRecord*> by_source;
  for (const auto& rev : log.revisions) {
    bool known = false;
    for (const auto& b : decomp.blocks)
      if (b.op_id == rev.source_block_op) known = true;
    if (!known)
      fail(Errc::MissingRevisionSource,
           "revision references block op " + std::to_string(rev.source_block_op));
    if (by_source.count(rev.source_block_op))
      fail(Errc::MissingRevisionSource, "two revisions share one source block");
    by_source[rev.source_block_op] = &rev;
  }
  auto emit_delta = [&](long k, SegKind seg) {
    const LinOp& d = inter.deltas[k];
    SimStep st;
    st.pid = inter.delta_pid[k];
    st.seg = seg;
    st.delta_index = k;
    if (d.is_scan) {
      st.tag = StepTag::Scan;
      st.view = effective_view(d.view, eng.setup().protocol.initial_values);
    } else {
      st.tag = StepTag::Update;
      st.comp = d.comp;
      st.value = d.value;
    }
    out.steps.push_back(std::move(st));
  };
  auto emit_hidden = [&](int pid, const std::vector<HiddenStep>& xi, SegKind seg) {
    for (const auto& h : xi) {
      SimStep st;
      st.pid = pid;
      st.seg = seg;
      if (h.is_scan) {
        st.tag = StepTag::Scan;
        st.view = h.view;
      } else {
        st.tag = StepTag::Update;
        st.comp = h.comp;
        st.value = h.value;
      }
      out.steps.push_back(std::move(st));
    }
  };
  long cursor = 0;
  for (const auto& b : decomp.blocks) {
    long t = b.t_pos >= 0 ? b.t_pos : b.z_pos;
    for (long k = cursor; k < t; ++k) emit_delta(k, SegKind::Alpha);
    auto rev = by_source.find(b.op_id);
    if (rev != by_source.end()) emit_hidden(rev->second->abs_pid, rev->second->xi, SegKind::Zeta);
    for (long k = t; k < b.z_pos; ++k) emit_delta(k, SegKind::Gamma);
    for (long k = b.z_pos; k < b.z_pos + b.len; ++k) emit_delta(k, SegKind::Beta);
    cursor = b.z_pos + b.len;
  }
  for (long k = cursor; k < static_cast<long>(inter.deltas.size()); ++k)
    emit_delta(k, SegKind::Alpha);
  std::vector<const TailRecord*> tails;
  for (const auto& t : log.tails) tails.push_back(&t);
  std::sort(tails.begin(), tails.end(),
            [](const TailRecord* a, const TailRecord* b) { return a->sim < b->sim; });
  for (const TailRecord* t : tails) {
    for (const auto& [pid, comp, value] : t->beta) {
      SimStep st;
      st.pid = pid;
      st.tag = StepTag::Update;
      st.comp = comp;
      st.value = value;
      st.seg = SegKind::TailBeta;
      out.steps.push_back(std::move(st));
    }
    emit_hidden(t->xi_pid, t->xi, SegKind::TailXi);
  }
  return out;
}

struct ReplayResult {
  Report report;
  std::vector<std::optional<Value>> outputs;  // per simulated process
  bool all_sim_outputs_present = true;        // each simulator output appears in sigma
};

// Replays the reconstructed execution through the protocol from the fanned-out
// initial configuration: every step applicable, scan responses as recorded,
// contents checkpoints along alpha segments, and final states matching the
// engine's stored states.
inline ReplayResult replay_validate(const Engine& eng, const Intermediate& inter,
                                    const SimExecution& sigma) {
  const SimulationSetup& setup = eng.setup();
  const auto& part = eng.partition();
  ReplayResult out;

  std::vector<Value> fan_inputs(setup.protocol.n, setup.inputs.empty() ? Value{} : setup.inputs[0]);
  for (int i = 0; i < setup.f; ++i)
    for (int abs : part[i]) fan_inputs[abs] = setup.inputs[i];
  Configuration config = initial_configuration(setup.protocol, fan_inputs);

  size_t main_len = 0;
  for (const auto& st : sigma.steps)
    if (st.seg != SegKind::TailBeta && st.seg != SegKind::TailXi) ++main_len;

  size_t idx = 0;
  bool aborted = false;
  for (const auto& st : sigma.steps) {
    ++out.report.checked;
    if (config.procs[st.pid].terminated()) {
      out.report.violation("step " + std::to_string(idx) + ": pid " + std::to_string(st.pid) +
                           " already terminated");
      aborted = true;
      break;
    }
    PoisedStep p = setup.protocol.next(st.pid, config.procs[st.pid].state);
    if (st.tag == StepTag::Scan) {
      if (p.tag != StepTag::Scan) {
        out.report.violation("step " + std::to_string(idx) + ": pid " + std::to_string(st.pid) +
                             " not poised at scan");
        aborted = true;
        break;
      }
      if (st.view != config.contents)
        out.report.violation("step " + std::to_string(idx) +
                             ": recorded scan response differs from replay contents");
      apply_step(config, st.pid, setup.protocol);
    } else {
      if (!(p.tag == StepTag::Update && p.comp == st.comp && p.value == st.value)) {
        out.report.violation("step " + std::to_string(idx) + ": pid " + std::to_string(st.pid) +
                             " not poised at update(" + std::to_string(st.comp) + ")");
        aborted = true;
        break;
      }
      apply_step(config, st.pid, setup.protocol);
    }
    // contents checkpoints hold at every position inside alpha segments
    if (st.seg == SegKind::Alpha && st.delta_index >= 0) {
      if (config.contents != inter.contents[st.delta_index + 1])
        out.report.violation("step " + std::to_string(idx) +
                             ": contents checkpoint mismatch at delta " +
                             std::to_string(st.delta_index));
    }
    ++idx;
    // final simulated states match the engine's stored states at the end of
    // the main part (before the appended tails)
    if (idx == main_len && !aborted) {
      for (int i = 0; i < setup.f; ++i) {
        const auto& fin = eng.log().final_states[i];
        if (fin.empty()) continue;
        for (size_t s = 0; s < part[i].size(); ++s) {
          const ProcState& got = config.procs[part[i][s]];
          const ProcState& want = fin[s];
          if (got.state != want.state || got.output != want.output)
            out.report.violation("final state mismatch for pid " +
                                 std::to_string(part[i][s]));
        }
      }
    }
  }
  for (const auto& ps : config.procs) out.outputs.push_back(ps.output);
  for (int i = 0; i < setup.f; ++i) {
    if (!eng.terminated(i)) continue;
    bool found = false;
    for (const auto& o : out.outputs)
      if (o && *o == *eng.output(i)) found = true;
    if (!found) {
      out.all_sim_outputs_present = false;
      out.report.violation("simulator " + std::to_string(i) +
                           " output not produced by any simulated process");
    }
  }
  return out;
}

}  // namespace snaplab
