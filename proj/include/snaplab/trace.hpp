#pragma once

#include <optional>
#include <vector>

#include "snaplab/common.hpp"
#include "snaplab/sw_snapshot.hpp"

namespace snaplab {

// A view of the augmented object: one entry per component, nullopt = never
// written.
using ViewB = std::vector<std::optional<Value>>;

inline std::string view_str(const ViewB& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i] ? *v[i] : "_";
  }
  return s + ")";
}

enum class AugOpKind { Scan, BlockUpdate };

// Recorded base-object step. seq is the index into Trace::events.
struct SwEventRec {
  long seq = -1;
  int actor = -1;
  bool is_scan = false;
  int op_id = -1;
  // update events
  std::vector<UpdateTriple> appended;
  struct HelpRec {
    int target;
    int index;
    long src_scan_seq;
  };
  std::vector<HelpRec> helps;
  // all events: update-triple lengths per H component after this step
  std::vector<int> post_lens;

  bool appends_updates() const { return !appended.empty(); }
};

// Boundary record of one augmented operation.
struct AugOpRec {
  int id = -1;
  int actor = -1;
  AugOpKind kind = AugOpKind::Scan;
  std::vector<int> comps;   // block args
  std::vector<Value> values;
  bool complete = false;
  bool yielded = false;
  std::optional<ViewB> result_view;  // scans and non-yield blocks
  Timestamp ts;                      // block timestamp
  long first_seq = -1;
  long last_seq = -1;
  // block internals, for the checkers
  long h_seq = -1;     // first scan
  long x_seq = -1;     // the append of the update triples
  long g_seq = -1;     // helping scan
  long hp_seq = -1;    // yield-check scan
  long read_seq = -1;  // final read scan (non-yield path)
  std::vector<int> h_lens;          // update lens at the first scan
  std::vector<int> selected_lens;   // update lens of the returned `last`
  // scan internals
  int failures = 0;          // failed double-collect iterations
  long final_scan_seq = -1;  // linearization point of a completed Scan
};

struct Trace {
  int f = 0;
  int m = 0;
  std::vector<SwEventRec> events;
  std::vector<AugOpRec> ops;

  long next_seq() const { return static_cast<long>(events.size()); }
};

}  // namespace snaplab
