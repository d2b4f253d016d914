#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "snaplab/common.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// The real system's base object: an f-component single-writer atomic snapshot
// H. Component i is an append-only list written only by process i. It holds
// two kinds of entries: update triples (component, value, timestamp) and help
// records ("L" entries) that embed the per-pair helping registers L[i][j][b]
// directly in the component, so one append can publish many helps in a single
// atomic step.
//
// Content comparisons between scan results (#, prefix, equality) are over the
// update triples only. Help appends never fail a double-collect equality test
// and never count as interference; the helping registers behave as separate
// single-writer registers that happen to ride along in the same component.
// ---------------------------------------------------------------------------

// f-vector timestamp, ordered lexicographically.
struct Timestamp {
  std::vector<int> v;

  bool operator==(const Timestamp& o) const { return v == o.v; }
  bool operator<(const Timestamp& o) const { return v < o.v; }   // lexicographic
  bool operator>(const Timestamp& o) const { return o < *this; }
  bool operator<=(const Timestamp& o) const { return !(o < *this); }
  bool operator>=(const Timestamp& o) const { return !(*this < o); }

  std::string str() const {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v[i]);
    }
    return s + ")";
  }
};

struct UpdateTriple {
  int comp = -1;  // component of the simulated object, 0-based
  Value value;
  Timestamp ts;

  bool operator==(const UpdateTriple& o) const {
    return comp == o.comp && value == o.value && ts == o.ts;
  }
};

struct ScanResultH;

// L[writer][target][index] := payload, embedded in the writer's component.
struct HelpTriple {
  int target = -1;
  int index = -1;
  std::shared_ptr<const ScanResultH> payload;
  long src_scan_seq = -1;  // trace seq of the scan whose result is the payload
};

struct ComponentHistory {
  std::vector<UpdateTriple> updates;
  std::vector<HelpTriple> helps;
  int blocks = 0;  // distinct timestamps among updates (#h_i)
};

struct ScanResultH {
  std::vector<ComponentHistory> comps;

  int f() const { return static_cast<int>(comps.size()); }
  int num_blocks(int i) const { return comps.at(i).blocks; }

  std::vector<int> update_lens() const {
    std::vector<int> lens;
    lens.reserve(comps.size());
    for (const auto& c : comps) lens.push_back(static_cast<int>(c.updates.size()));
    return lens;
  }
};

enum class PrefixRel { ProperPrefix, Equal, NotPrefix };

// Componentwise prefix comparison over update triples.
inline PrefixRel is_prefix(const ScanResultH& h, const ScanResultH& hp) {
  if (h.f() != hp.f()) fail(Errc::BadParameters, "prefix comparison needs equal f");
  bool proper = false;
  for (int i = 0; i < h.f(); ++i) {
    const auto& a = h.comps[i].updates;
    const auto& b = hp.comps[i].updates;
    if (a.size() > b.size()) return PrefixRel::NotPrefix;
    for (size_t k = 0; k < a.size(); ++k)
      if (!(a[k] == b[k])) return PrefixRel::NotPrefix;
    if (a.size() < b.size()) proper = true;
  }
  return proper ? PrefixRel::ProperPrefix : PrefixRel::Equal;
}

inline bool same_updates(const ScanResultH& a, const ScanResultH& b) {
  return is_prefix(a, b) == PrefixRel::Equal;
}

// Reads the embedded register L[from][to][index] out of a scan result:
// the last matching help record in component `from`, or nothing.
inline std::optional<HelpTriple> l_read(const ScanResultH& h, int from, int to, int index) {
  const auto& helps = h.comps.at(from).helps;
  for (auto it = helps.rbegin(); it != helps.rend(); ++it)
    if (it->target == to && it->index == index) return *it;
  return std::nullopt;
}

// One append's worth of entries. All entries go to the writer's component in
// one atomic step.
struct AppendBatch {
  std::vector<UpdateTriple> updates;  // at most one timestamp per batch
  std::vector<HelpTriple> helps;

  bool appends_updates() const { return !updates.empty(); }
};

class SwSnapshot {
 public:
  explicit SwSnapshot(int f) : hist_(f) {}

  int f() const { return static_cast<int>(hist_.size()); }

  // One atomic step: append the batch to the writer's component, in order.
  void update(int writer, const AppendBatch& batch) {
    auto& comp = hist_.at(writer);
    if (!batch.updates.empty()) {
      const Timestamp& ts = batch.updates.front().ts;
      for (const auto& u : batch.updates)
        if (!(u.ts == ts)) fail(Errc::BadParameters, "one timestamp per append");
      comp.blocks += 1;
    }
    for (const auto& u : batch.updates) comp.updates.push_back(u);
    for (const auto& h : batch.helps) comp.helps.push_back(h);
  }

  // One atomic step: snapshot every component.
  ScanResultH scan() const {
    ScanResultH r;
    r.comps = hist_;
    return r;
  }

 private:
  std::vector<ComponentHistory> hist_;
};

}  // namespace snaplab
