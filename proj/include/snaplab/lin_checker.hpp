#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snaplab/aug_snapshot.hpp"
#include "snaplab/common.hpp"
#include "snaplab/trace.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// Assigns linearization points to recorded traces and verifies the
// correctness properties of the augmented snapshot:
//   * Scans linearize at their last base scan.
//   * Each Update linearizes at the first point where H holds a triple for
//     its component with a timestamp at least as large; ties order by
//     timestamp, then component.
//   * Non-yield Block-Updates: contiguous updates, a valid view point T,
//     scan-free disjoint windows.
//   * Yields are caused by lower-identifier appends; process 0 never yields.
//   * Step counts: 6 per atomic Block-Update, 5 per yield, 2k+3 per Scan.
// ---------------------------------------------------------------------------

struct LinOp {
  bool is_scan = false;
  int op_id = -1;
  int actor = -1;
  long point = -1;  // sw event seq
  // scan fields
  ViewB view;
  // update fields
  int comp = -1;
  Value value;
  Timestamp ts;
  bool parent_complete = false;
  bool parent_atomic = false;  // complete and not yielded
};

struct LinHistory {
  std::vector<LinOp> items;  // in linearization order
};

struct Report {
  long checked = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  void violation(std::string v) { violations.push_back(std::move(v)); }
  void merge(const Report& o) {
    checked += o.checked;
    violations.insert(violations.end(), o.violations.begin(), o.violations.end());
  }
};

inline LinHistory assign_points(const Trace& trace) {
  LinHistory hist;
  // Completed Scans linearize at their final base scan.
  for (const auto& op : trace.ops) {
    if (op.kind != AugOpKind::Scan || !op.complete) continue;
    LinOp item;
    item.is_scan = true;
    item.op_id = op.id;
    item.actor = op.actor;
    item.point = op.final_scan_seq;
    item.view = *op.result_view;
    hist.items.push_back(item);
  }
  // Updates of every Block-Update whose append executed. Incomplete Scans are
  // dropped; a pending Block-Update without its append is dropped too.
  struct PendingUpd {
    LinOp item;
  };
  std::vector<LinOp> updates;
  for (const auto& op : trace.ops) {
    if (op.kind != AugOpKind::BlockUpdate || op.x_seq < 0) continue;
    for (size_t g = 0; g < op.comps.size(); ++g) {
      LinOp item;
      item.is_scan = false;
      item.op_id = op.id;
      item.actor = op.actor;
      item.comp = op.comps[g];
      item.value = op.values[g];
      item.ts = op.ts;
      item.parent_complete = op.complete;
      item.parent_atomic = op.complete && !op.yielded;
      updates.push_back(item);
    }
  }
  // First point at which H contains a triple with this component and a
  // timestamp at least as large.
  for (const auto& ev : trace.events) {
    if (ev.is_scan || ev.appended.empty()) continue;
    for (const auto& tri : ev.appended) {
      for (auto& u : updates) {
        if (u.point >= 0 || u.comp != tri.comp) continue;
        if (tri.ts >= u.ts) u.point = ev.seq;
      }
    }
  }
  for (auto& u : updates) {
    if (u.point < 0) fail(Errc::MalformedTrace, "update with executed append has no point");
    hist.items.push_back(u);
  }
  std::sort(hist.items.begin(), hist.items.end(), [](const LinOp& a, const LinOp& b) {
    if (a.point != b.point) return a.point < b.point;
    if (a.is_scan != b.is_scan) return b.is_scan;  // never expected; scans sort last
    if (!(a.ts == b.ts)) return a.ts < b.ts;
    return a.comp < b.comp;
  });
  return hist;
}

// Contents of the augmented object after each history prefix. Entry p is the
// contents after items[0..p]; p = -1 would be the all-bottom initial state.
inline std::vector<ViewB> contents_timeline(const LinHistory& hist, int m) {
  std::vector<ViewB> after;
  ViewB cur(m);
  after.reserve(hist.items.size());
  for (const auto& it : hist.items) {
    if (!it.is_scan) cur[it.comp] = it.value;
    after.push_back(cur);
  }
  return after;
}

// Every Scan's view equals the contents at its point.
inline Report check_scan_semantics(const LinHistory& hist, int m) {
  Report rep;
  ViewB cur(m);
  for (size_t k = 0; k < hist.items.size(); ++k) {
    const auto& it = hist.items[k];
    if (!it.is_scan) {
      cur[it.comp] = it.value;
      continue;
    }
    ++rep.checked;
    if (it.view != cur)
      rep.violation("scan op " + std::to_string(it.op_id) + " at position " + std::to_string(k) +
                    " returned " + view_str(it.view) + " expected " + view_str(cur));
  }
  return rep;
}

// Block-Update semantics for non-yield blocks: contiguity at the append,
// a valid view point T between Z' and Z, and scan-free pairwise-disjoint
// windows.
inline Report check_block_semantics(const LinHistory& hist, const Trace& trace) {
  Report rep;
  std::vector<ViewB> after = contents_timeline(hist, trace.m);
  std::map<int, std::vector<long>> positions;  // block op -> item positions
  for (size_t k = 0; k < hist.items.size(); ++k)
    if (!hist.items[k].is_scan) positions[hist.items[k].op_id].push_back(static_cast<long>(k));

  struct Window {
    int op_id;
    long begin;  // first seq inside the window (L + 1)
    long end;    // the append seq X, inclusive
  };
  std::vector<Window> windows;

  for (const auto& op : trace.ops) {
    if (op.kind != AugOpKind::BlockUpdate || !op.complete || op.yielded) continue;
    ++rep.checked;
    const auto& pos = positions[op.id];
    // (a) contiguous run at the append X, ordered by component.
    bool contiguous = pos.size() == op.comps.size();
    for (size_t g = 0; g + 1 < pos.size(); ++g)
      if (pos[g + 1] != pos[g] + 1) contiguous = false;
    for (long p : pos)
      if (hist.items[p].point != op.x_seq) contiguous = false;
    for (size_t g = 0; g + 1 < pos.size(); ++g)
      if (hist.items[pos[g]].comp > hist.items[pos[g + 1]].comp) contiguous = false;
    if (!contiguous) {
      rep.violation("block op " + std::to_string(op.id) + " updates not contiguous at its append");
      continue;
    }
    long z = pos.front();
    // Z': last update before Z from an atomic block, or start.
    long zprime = -1;
    for (long k = z - 1; k >= 0; --k) {
      const auto& it = hist.items[k];
      if (!it.is_scan && it.parent_atomic) {
        zprime = k;
        break;
      }
    }
    // (b) search for T: earliest position p in [zprime, z) whose contents
    // equal the returned view, with only yield-updates by other processes
    // after it.
    const ViewB& want = *op.result_view;
    auto contents_at = [&](long p) -> ViewB {
      if (p < 0) return ViewB(trace.m);
      return after[p];
    };
    bool found = false;
    for (long p = zprime; p < z && !found; ++p) {
      if (contents_at(p) != want) continue;
      bool clean = true;
      for (long k = p + 1; k < z; ++k) {
        const auto& it = hist.items[k];
        if (it.is_scan || it.parent_atomic || it.actor == op.actor) {
          clean = false;
          break;
        }
      }
      if (clean) found = true;
    }
    if (!found)
      rep.violation("block op " + std::to_string(op.id) + " has no valid view point T; returned " +
                    view_str(want));
    // (c) window: (L, X] where L is the last base scan returning the selected
    // result.
    long l_seq = -1;
    for (const auto& ev : trace.events)
      if (ev.is_scan && ev.post_lens == op.selected_lens) l_seq = ev.seq;
    if (l_seq < 0) {
      rep.violation("block op " + std::to_string(op.id) + " selected result matches no scan");
      continue;
    }
    if (l_seq < op.h_seq || l_seq >= op.x_seq)
      rep.violation("block op " + std::to_string(op.id) + " window outside [H, X): L=" +
                    std::to_string(l_seq));
    for (const auto& other : trace.ops)
      if (other.kind == AugOpKind::Scan && other.complete && other.final_scan_seq > l_seq &&
          other.final_scan_seq <= op.x_seq)
        rep.violation("scan op " + std::to_string(other.id) + " linearized inside window of block " +
                      std::to_string(op.id));
    windows.push_back({op.id, l_seq + 1, op.x_seq});
  }
  // (d) pairwise disjoint windows.
  std::sort(windows.begin(), windows.end(),
            [](const Window& a, const Window& b) { return a.begin < b.begin; });
  for (size_t i = 0; i + 1 < windows.size(); ++i)
    if (windows[i + 1].begin <= windows[i].end)
      rep.violation("windows of blocks " + std::to_string(windows[i].op_id) + " and " +
                    std::to_string(windows[i + 1].op_id) + " overlap");
  return rep;
}

// Every yield's interval contains an update-triple append by a
// lower-identifier process; process 0 never yields.
inline Report check_yield_cause(const Trace& trace) {
  Report rep;
  for (const auto& op : trace.ops) {
    if (op.kind != AugOpKind::BlockUpdate || !op.complete || !op.yielded) continue;
    ++rep.checked;
    if (op.actor == 0) {
      rep.violation("process 0 yielded in op " + std::to_string(op.id));
      continue;
    }
    bool cause = false;
    for (const auto& ev : trace.events) {
      if (ev.seq <= op.h_seq) continue;
      if (ev.seq >= op.hp_seq) break;
      if (!ev.is_scan && ev.appends_updates() && ev.actor < op.actor) cause = true;
    }
    if (!cause)
      rep.violation("yield op " + std::to_string(op.id) +
                    " has no lower-identifier append in its interval");
  }
  return rep;
}

// Exact step counts per completed operation, with attribution of every failed
// Scan iteration to an interfering append.
inline Report check_step_counts(const Trace& trace) {
  Report rep;
  std::map<int, std::vector<const SwEventRec*>> by_op;
  for (const auto& ev : trace.events) by_op[ev.op_id].push_back(&ev);
  for (const auto& op : trace.ops) {
    if (!op.complete) continue;
    ++rep.checked;
    const auto& evs = by_op[op.id];
    if (op.kind == AugOpKind::BlockUpdate) {
      size_t want = op.yielded ? 5 : 6;
      if (evs.size() != want)
        rep.violation("block op " + std::to_string(op.id) + " took " + std::to_string(evs.size()) +
                      " steps, expected " + std::to_string(want));
      continue;
    }
    // Scan: steps = 2k+3 where k = failed iterations, each attributable.
    std::vector<long> scan_seqs;
    for (const auto* ev : evs)
      if (ev->is_scan) scan_seqs.push_back(ev->seq);
    long k = op.failures;
    if (static_cast<long>(evs.size()) != 2 * k + 3)
      rep.violation("scan op " + std::to_string(op.id) + " took " + std::to_string(evs.size()) +
                    " steps with k=" + std::to_string(k));
    if (static_cast<long>(scan_seqs.size()) != k + 2)
      rep.violation("scan op " + std::to_string(op.id) + " base scan count mismatch");
    long interfering = 0;
    for (const auto& ev : trace.events)
      if (!ev.is_scan && ev.appends_updates() && ev.actor != op.actor && ev.seq > op.first_seq &&
          ev.seq < op.last_seq)
        ++interfering;
    if (k > interfering)
      rep.violation("scan op " + std::to_string(op.id) + " failed " + std::to_string(k) +
                    " times with only " + std::to_string(interfering) + " interfering appends");
    for (long it = 1; it + 1 < static_cast<long>(scan_seqs.size()); ++it) {
      // iteration `it` failed: some other process appended update triples
      // between the previous base scan and this one.
      bool attributed = false;
      for (const auto& ev : trace.events) {
        if (ev.seq <= scan_seqs[it - 1]) continue;
        if (ev.seq >= scan_seqs[it]) break;
        if (!ev.is_scan && ev.appends_updates() && ev.actor != op.actor) attributed = true;
      }
      if (!attributed)
        rep.violation("scan op " + std::to_string(op.id) + " failed iteration " +
                      std::to_string(it) + " without an interfering append");
    }
  }
  return rep;
}

// Help durability: any result written into the helping register a non-yield
// Block-Update reads from, before it reads, is a prefix of the result the
// Block-Update selects.
inline Report check_help_durability(const Trace& trace) {
  Report rep;
  for (const auto& op : trace.ops) {
    if (op.kind != AugOpKind::BlockUpdate || !op.complete || op.yielded) continue;
    int own_blocks = 0;
    for (const auto& ev : trace.events) {
      if (ev.seq >= op.h_seq) break;
      if (ev.actor == op.actor && ev.appends_updates()) ++own_blocks;
    }
    for (const auto& ev : trace.events) {
      if (ev.seq >= op.read_seq) break;
      if (ev.is_scan || ev.actor == op.actor) continue;
      for (const auto& h : ev.helps) {
        if (h.target != op.actor || h.index != own_blocks) continue;
        ++rep.checked;
        const auto& payload_lens = trace.events.at(h.src_scan_seq).post_lens;
        for (size_t c = 0; c < payload_lens.size(); ++c)
          if (payload_lens[c] > op.selected_lens[c]) {
            rep.violation("help written at seq " + std::to_string(ev.seq) +
                          " is not a prefix of block op " + std::to_string(op.id) +
                          "'s selected result");
            break;
          }
      }
    }
  }
  return rep;
}

// Trace-level sanity: prefix monotonicity of base scans (both directions of
// the append-only observation).
inline Report check_prefix_monotone(const Trace& trace) {
  Report rep;
  const std::vector<int>* prev = nullptr;
  long prev_seq = -1;
  for (const auto& ev : trace.events) {
    if (!ev.is_scan) continue;
    ++rep.checked;
    if (prev) {
      bool le = true;
      for (size_t i = 0; i < prev->size(); ++i)
        if ((*prev)[i] > ev.post_lens[i]) le = false;
      if (!le)
        rep.violation("scan at seq " + std::to_string(ev.seq) +
                      " not an extension of scan at seq " + std::to_string(prev_seq));
    }
    prev = &ev.post_lens;
    prev_seq = ev.seq;
  }
  return rep;
}

struct FullCheck {
  Report scan_semantics;
  Report block_semantics;
  Report yield_cause;
  Report step_counts;
  Report help_durability;
  Report prefix_monotone;

  bool ok() const {
    return scan_semantics.ok() && block_semantics.ok() && yield_cause.ok() && step_counts.ok() &&
           help_durability.ok() && prefix_monotone.ok();
  }

  Report merged() const {
    Report rep;
    rep.merge(scan_semantics);
    rep.merge(block_semantics);
    rep.merge(yield_cause);
    rep.merge(step_counts);
    rep.merge(help_durability);
    rep.merge(prefix_monotone);
    return rep;
  }
};

inline FullCheck check_all(const Trace& trace) {
  FullCheck fc;
  LinHistory hist = assign_points(trace);
  fc.scan_semantics = check_scan_semantics(hist, trace.m);
  fc.block_semantics = check_block_semantics(hist, trace);
  fc.yield_cause = check_yield_cause(trace);
  fc.step_counts = check_step_counts(trace);
  fc.help_durability = check_help_durability(trace);
  fc.prefix_monotone = check_prefix_monotone(trace);
  return fc;
}

}  // namespace snaplab
