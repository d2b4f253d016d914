#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "snaplab/common.hpp"
#include "snaplab/sw_snapshot.hpp"
#include "snaplab/trace.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// The augmented m-component snapshot shared by f processes, built on the
// single-writer snapshot H. Operations are resumable step machines: each call
// to AugWorld::step performs exactly one base-object step on behalf of one
// process, so a scheduler owns all interleaving.
// ---------------------------------------------------------------------------

// t_j = #h_j for j != caller, t_caller = #h_caller + 1.
inline Timestamp new_timestamp(const ScanResultH& h, int caller) {
  Timestamp t;
  t.v.resize(h.f());
  for (int j = 0; j < h.f(); ++j) t.v[j] = h.num_blocks(j);
  t.v.at(caller) += 1;
  return t;
}

// Per component of the augmented object, the value carrying the
// lexicographically largest timestamp among all update triples in h.
inline ViewB get_view(const ScanResultH& h, int m) {
  ViewB view(m);
  for (int j = 0; j < m; ++j) {
    const UpdateTriple* best = nullptr;
    bool dup = false;
    for (const auto& comp : h.comps) {
      for (const auto& u : comp.updates) {
        if (u.comp != j) continue;
        if (!best || u.ts < best->ts) {
          if (!best) best = &u;
          continue;
        }
        if (u.ts == best->ts) {
          dup = true;
        } else if (best->ts < u.ts) {
          best = &u;
          dup = false;
        }
      }
    }
    if (dup) fail(Errc::DuplicateTimestamp, "component " + std::to_string(j));
    if (best) view[j] = best->value;
  }
  return view;
}

struct AugResult {
  bool yielded = false;
  ViewB view;
};

class AugWorld {
 public:
  AugWorld(int f, int m) : snapshot_(f), pending_(f, -1), pending_b_(f, -1) {
    trace_.f = f;
    trace_.m = m;
  }

  int f() const { return trace_.f; }
  int m() const { return trace_.m; }
  const Trace& trace() const { return trace_; }

  bool busy(int actor) const { return pending_.at(actor) >= 0 || pending_b_.at(actor) >= 0; }

  int begin_scan(int actor) {
    require_idle(actor);
    AugOpRec rec;
    rec.id = static_cast<int>(trace_.ops.size());
    rec.actor = actor;
    rec.kind = AugOpKind::Scan;
    trace_.ops.push_back(rec);
    scans_.push_back(ScanState{});
    scan_of_op_.push_back(static_cast<int>(scans_.size()) - 1);
    block_of_op_.push_back(-1);
    pending_[actor] = rec.id;
    return rec.id;
  }

  int begin_block_update(int actor, std::vector<int> comps, std::vector<Value> values) {
    require_idle(actor);
    if (comps.empty() || comps.size() != values.size())
      fail(Errc::BadComponentList, "component/value lists must be nonempty and equal length");
    std::set<int> distinct(comps.begin(), comps.end());
    if (distinct.size() != comps.size()) fail(Errc::BadComponentList, "components must be distinct");
    for (int c : comps)
      if (c < 0 || c >= trace_.m) fail(Errc::BadComponentList, "component out of range");
    AugOpRec rec;
    rec.id = static_cast<int>(trace_.ops.size());
    rec.actor = actor;
    rec.kind = AugOpKind::BlockUpdate;
    rec.comps = comps;
    rec.values = values;
    trace_.ops.push_back(rec);
    blocks_.push_back(BlockState{});
    block_of_op_.push_back(static_cast<int>(blocks_.size()) - 1);
    scan_of_op_.push_back(-1);
    pending_b_[actor] = rec.id;
    return rec.id;
  }

  // Advances actor's pending operation by one base step. Returns true when
  // the operation completed at this step.
  bool step(int actor) {
    if (pending_.at(actor) >= 0) return step_scan(actor, pending_[actor]);
    if (pending_b_.at(actor) >= 0) return step_block(actor, pending_b_[actor]);
    fail(Errc::BadParameters, "no pending operation for actor " + std::to_string(actor));
  }

  const AugOpRec& op(int op_id) const { return trace_.ops.at(op_id); }

  AugResult result(int op_id) const {
    const AugOpRec& rec = trace_.ops.at(op_id);
    if (!rec.complete) fail(Errc::BadParameters, "operation not complete");
    AugResult r;
    r.yielded = rec.yielded;
    if (rec.result_view) r.view = *rec.result_view;
    return r;
  }

 private:
  struct ScanState {
    int phase = 0;  // 0: first scan, 1: help write, 2: check scan
    std::shared_ptr<const ScanResultH> h;
    long h_seq = -1;
  };

  struct BlockState {
    int phase = 0;  // 0:h 1:X 2:g 3:help 4:h' 5:read
    std::shared_ptr<const ScanResultH> h;
    Timestamp ts;
  };

  void require_idle(int actor) {
    if (actor < 0 || actor >= trace_.f) fail(Errc::BadParameters, "actor out of range");
    if (busy(actor)) fail(Errc::BadParameters, "actor already has a pending operation");
  }

  long record_scan(int actor, int op_id, const ScanResultH& result) {
    SwEventRec ev;
    ev.seq = trace_.next_seq();
    ev.actor = actor;
    ev.is_scan = true;
    ev.op_id = op_id;
    ev.post_lens = result.update_lens();
    trace_.events.push_back(ev);
    return ev.seq;
  }

  long record_update(int actor, int op_id, const AppendBatch& batch) {
    SwEventRec ev;
    ev.seq = trace_.next_seq();
    ev.actor = actor;
    ev.is_scan = false;
    ev.op_id = op_id;
    ev.appended = batch.updates;
    for (const auto& h : batch.helps)
      ev.helps.push_back({h.target, h.index, h.src_scan_seq});
    snapshot_.update(actor, batch);
    ev.post_lens = snapshot_.scan().update_lens();
    trace_.events.push_back(ev);
    return ev.seq;
  }

  bool step_scan(int actor, int op_id) {
    AugOpRec& rec = trace_.ops[op_id];
    ScanState& st = scans_[scan_of_op_[op_id]];
    switch (st.phase) {
      case 0: {
        auto h = std::make_shared<ScanResultH>(snapshot_.scan());
        long seq = record_scan(actor, op_id, *h);
        rec.first_seq = seq;
        st.h = h;
        st.h_seq = seq;
        st.phase = 1;
        return false;
      }
      case 1: {
        AppendBatch batch;
        for (int j = 0; j < trace_.f; ++j) {
          if (j == actor) continue;
          batch.helps.push_back({j, st.h->num_blocks(j), st.h, st.h_seq});
        }
        record_update(actor, op_id, batch);
        st.phase = 2;
        return false;
      }
      case 2: {
        auto hp = std::make_shared<ScanResultH>(snapshot_.scan());
        long seq = record_scan(actor, op_id, *hp);
        if (same_updates(*st.h, *hp)) {
          rec.complete = true;
          rec.result_view = get_view(*st.h, trace_.m);
          rec.final_scan_seq = seq;
          rec.last_seq = seq;
          pending_[actor] = -1;
          return true;
        }
        rec.failures += 1;
        st.h = hp;
        st.h_seq = seq;
        st.phase = 1;
        return false;
      }
    }
    fail(Errc::BadParameters, "bad scan phase");
  }

  bool step_block(int actor, int op_id) {
    AugOpRec& rec = trace_.ops[op_id];
    BlockState& st = blocks_[block_of_op_[op_id]];
    switch (st.phase) {
      case 0: {
        auto h = std::make_shared<ScanResultH>(snapshot_.scan());
        long seq = record_scan(actor, op_id, *h);
        rec.first_seq = seq;
        rec.h_seq = seq;
        rec.h_lens = h->update_lens();
        st.h = h;
        st.phase = 1;
        return false;
      }
      case 1: {
        st.ts = new_timestamp(*st.h, actor);
        rec.ts = st.ts;
        AppendBatch batch;
        for (size_t g = 0; g < rec.comps.size(); ++g)
          batch.updates.push_back({rec.comps[g], rec.values[g], st.ts});
        rec.x_seq = record_update(actor, op_id, batch);
        st.phase = 2;
        return false;
      }
      case 2: {
        auto g = std::make_shared<ScanResultH>(snapshot_.scan());
        rec.g_seq = record_scan(actor, op_id, *g);
        // helping lower identifiers happens at the next step using g
        g_of_block_[op_id] = g;
        st.phase = 3;
        return false;
      }
      case 3: {
        auto g = g_of_block_[op_id];
        AppendBatch batch;
        for (int j = 0; j < actor; ++j)
          batch.helps.push_back({j, g->num_blocks(j), g, rec.g_seq});
        record_update(actor, op_id, batch);
        st.phase = 4;
        return false;
      }
      case 4: {
        auto hp = std::make_shared<ScanResultH>(snapshot_.scan());
        rec.hp_seq = record_scan(actor, op_id, *hp);
        bool lower_moved = false;
        for (int j = 0; j < actor; ++j)
          if (hp->num_blocks(j) > st.h->num_blocks(j)) lower_moved = true;
        if (lower_moved) {
          rec.complete = true;
          rec.yielded = true;
          rec.last_seq = rec.hp_seq;
          pending_b_[actor] = -1;
          return true;
        }
        st.phase = 5;
        return false;
      }
      case 5: {
        auto rs = std::make_shared<ScanResultH>(snapshot_.scan());
        rec.read_seq = record_scan(actor, op_id, *rs);
        const ScanResultH* last = st.h.get();
        int own_blocks = st.h->num_blocks(actor);
        for (int j = 0; j < trace_.f; ++j) {
          if (j == actor) continue;
          auto r = l_read(*rs, j, actor, own_blocks);
          if (r && r->payload && is_prefix(*last, *r->payload) == PrefixRel::ProperPrefix)
            last = r->payload.get();
        }
        rec.complete = true;
        rec.yielded = false;
        rec.result_view = get_view(*last, trace_.m);
        rec.selected_lens = last->update_lens();
        rec.last_seq = rec.read_seq;
        pending_b_[actor] = -1;
        return true;
      }
    }
    fail(Errc::BadParameters, "bad block phase");
  }

  SwSnapshot snapshot_;
  Trace trace_;
  std::vector<int> pending_;    // actor -> scan op id or -1
  std::vector<int> pending_b_;  // actor -> block op id or -1
  std::vector<ScanState> scans_;
  std::vector<BlockState> blocks_;
  std::vector<int> scan_of_op_;
  std::vector<int> block_of_op_;
  std::unordered_map<int, std::shared_ptr<const ScanResultH>> g_of_block_;
};

}  // namespace snaplab
