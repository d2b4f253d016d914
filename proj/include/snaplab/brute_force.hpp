#pragma once

#include <optional>
#include <vector>

#include "snaplab/common.hpp"
#include "snaplab/trace.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// Independent linearizability oracle for tiny traces. Exhaustively searches
// total orders of the abstract operations that respect real-time intervals,
// keep atomic Block-Updates contiguous, and satisfy the sequential semantics:
// scans return current contents, and a non-yield Block-Update returns the
// contents at some point T after the previous atomic Update with no Scan
// between T and its own first Update. Implementation-independent: uses only
// operation boundaries, arguments and results.
// ---------------------------------------------------------------------------

namespace detail {

struct BfItem {
  bool is_scan = false;
  int block = -1;  // index into block table for updates
  int comp = -1;
  Value value;
  ViewB view;  // scan result
  long start = 0, end = 0;
};

struct BfBlock {
  bool atomic = false;
  ViewB view;
  int updates_total = 0;
};

struct BfState {
  const std::vector<BfItem>* items;
  const std::vector<BfBlock>* blocks;
  int m;
  std::vector<bool> placed;
  std::vector<int> placed_of_block;
  std::vector<ViewB> contents_after;  // per placed position
  std::vector<bool> is_scan_at;
  std::vector<int> open_block = {};  // singleton stack: the open atomic block
  int last_atomic_update_pos = -1;

  ViewB contents_at(int pos) const {
    if (pos < 0) return ViewB(m);
    return contents_after[pos];
  }
};

inline bool bf_dfs(BfState& st) {
  const auto& items = *st.items;
  size_t total = items.size();
  size_t placed_count = st.contents_after.size();
  if (placed_count == total) return true;
  for (size_t i = 0; i < total; ++i) {
    if (st.placed[i]) continue;
    const BfItem& it = items[i];
    // contiguity: while an atomic block is open, only its updates may go.
    if (!st.open_block.empty()) {
      if (it.is_scan || it.block != st.open_block.back()) continue;
    }
    // real-time order: nothing unplaced may be wholly before this item.
    bool minimal = true;
    for (size_t j = 0; j < total && minimal; ++j)
      if (j != i && !st.placed[j] && items[j].end < it.start) minimal = false;
    if (!minimal) continue;

    ViewB cur = placed_count ? st.contents_after.back() : ViewB(st.m);
    if (it.is_scan) {
      if (it.view != cur) continue;
    } else {
      const BfBlock& blk = (*st.blocks)[it.block];
      if (blk.atomic && st.placed_of_block[it.block] == 0) {
        // first update Z of an atomic block: check the view condition now.
        bool ok = false;
        for (int p = st.last_atomic_update_pos; p < static_cast<int>(placed_count) && !ok; ++p) {
          if (st.contents_at(p) != blk.view) continue;
          bool scan_free = true;
          for (int q = p + 1; q < static_cast<int>(placed_count); ++q)
            if (st.is_scan_at[q]) scan_free = false;
          if (scan_free) ok = true;
        }
        if (!ok) continue;
      }
      cur[it.comp] = it.value;
    }

    // place
    st.placed[i] = true;
    int saved_last_atomic = st.last_atomic_update_pos;
    bool opened = false, closed = false;
    if (!it.is_scan) {
      st.placed_of_block[it.block] += 1;
      const BfBlock& blk = (*st.blocks)[it.block];
      if (blk.atomic) {
        st.last_atomic_update_pos = static_cast<int>(placed_count);
        if (st.placed_of_block[it.block] == 1 && blk.updates_total > 1) {
          st.open_block.push_back(it.block);
          opened = true;
        } else if (!st.open_block.empty() && st.placed_of_block[it.block] == blk.updates_total) {
          st.open_block.pop_back();
          closed = true;
        }
      }
    }
    st.contents_after.push_back(cur);
    st.is_scan_at.push_back(it.is_scan);

    if (bf_dfs(st)) return true;

    // undo
    st.contents_after.pop_back();
    st.is_scan_at.pop_back();
    if (!it.is_scan) {
      st.placed_of_block[it.block] -= 1;
      if (opened) st.open_block.pop_back();
      if (closed) st.open_block.push_back(it.block);
    }
    st.last_atomic_update_pos = saved_last_atomic;
    st.placed[i] = false;
  }
  return false;
}

}  // namespace detail

// True iff some valid linearization exists. Throws TooLarge beyond `limit`
// abstract operations (scans plus individual updates).
inline bool brute_force_linearizable(const Trace& trace, int limit = 8) {
  std::vector<detail::BfItem> items;
  std::vector<detail::BfBlock> blocks;
  std::vector<int> block_index(trace.ops.size(), -1);
  for (const auto& op : trace.ops) {
    if (op.kind == AugOpKind::Scan) {
      if (!op.complete) continue;  // pending scans are dropped
      detail::BfItem it;
      it.is_scan = true;
      it.view = *op.result_view;
      it.start = op.first_seq;
      it.end = op.last_seq;
      items.push_back(it);
    } else {
      if (op.x_seq < 0) continue;  // append never executed: dropped
      detail::BfBlock blk;
      blk.atomic = op.complete && !op.yielded;
      if (blk.atomic) blk.view = *op.result_view;
      blk.updates_total = static_cast<int>(op.comps.size());
      block_index[op.id] = static_cast<int>(blocks.size());
      blocks.push_back(blk);
      long end = op.complete ? op.last_seq : static_cast<long>(trace.events.size());
      for (size_t g = 0; g < op.comps.size(); ++g) {
        detail::BfItem it;
        it.is_scan = false;
        it.block = block_index[op.id];
        it.comp = op.comps[g];
        it.value = op.values[g];
        it.start = op.first_seq;
        it.end = end;
        items.push_back(it);
      }
    }
  }
  if (static_cast<int>(items.size()) > limit)
    fail(Errc::TooLarge, std::to_string(items.size()) + " abstract operations, limit " +
                             std::to_string(limit));
  detail::BfState st;
  st.items = &items;
  st.blocks = &blocks;
  st.m = trace.m;
  st.placed.assign(items.size(), false);
  st.placed_of_block.assign(blocks.size(), 0);
  return detail::bf_dfs(st);
}

}  // namespace snaplab
