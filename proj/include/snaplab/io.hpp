#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "snaplab/engine.hpp"
#include "snaplab/engine_analysis.hpp"
#include "snaplab/ndst.hpp"
#include "snaplab/trace.hpp"

namespace snaplab {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Line-delimited artifact formats. One JSON object per line throughout, so
// artifacts stream and diff cleanly; identical seeds produce identical bytes.
// ---------------------------------------------------------------------------

inline Json view_json(const ViewB& v) {
  Json arr = Json::array();
  for (const auto& e : v)
    arr.push_back(e ? Json(*e) : Json(nullptr));
  return arr;
}

inline ViewB view_from_json(const Json& j) {
  ViewB v;
  for (const auto& e : j)
    v.push_back(e.is_null() ? std::optional<Value>{} : std::optional<Value>{e.get<Value>()});
  return v;
}

inline void write_trace(std::ostream& os, const Trace& trace) {
  Json head{{"type", "head"}, {"f", trace.f}, {"m", trace.m}};
  os << head.dump() << "\n";
  for (const auto& op : trace.ops) {
    Json j{{"type", "begin"},
           {"op", op.id},
           {"actor", op.actor},
           {"kind", op.kind == AugOpKind::Scan ? "scan" : "block"}};
    if (op.kind == AugOpKind::BlockUpdate) {
      j["comps"] = op.comps;
      j["values"] = op.values;
    }
    os << j.dump() << "\n";
  }
  for (const auto& ev : trace.events) {
    Json j{{"type", "sw"},
           {"seq", ev.seq},
           {"actor", ev.actor},
           {"kind", ev.is_scan ? "scan" : "update"},
           {"op", ev.op_id},
           {"lens", ev.post_lens}};
    if (!ev.is_scan) {
      Json ups = Json::array();
      for (const auto& u : ev.appended)
        ups.push_back(Json{{"c", u.comp}, {"v", u.value}, {"ts", u.ts.v}});
      j["appended"] = ups;
      Json helps = Json::array();
      for (const auto& h : ev.helps)
        helps.push_back(Json{{"to", h.target}, {"idx", h.index}, {"src", h.src_scan_seq}});
      j["helps"] = helps;
    }
    os << j.dump() << "\n";
  }
  for (const auto& op : trace.ops) {
    Json j{{"type", "end"}, {"op", op.id}, {"complete", op.complete}};
    if (op.complete) {
      j["first"] = op.first_seq;
      j["last"] = op.last_seq;
      if (op.kind == AugOpKind::Scan) {
        j["view"] = view_json(*op.result_view);
        j["failures"] = op.failures;
        j["final_scan"] = op.final_scan_seq;
      } else {
        j["yield"] = op.yielded;
        j["ts"] = op.ts.v;
        j["x"] = op.x_seq;
        j["h"] = op.h_seq;
        j["g"] = op.g_seq;
        j["hp"] = op.hp_seq;
        if (!op.yielded) {
          j["view"] = view_json(*op.result_view);
          j["read"] = op.read_seq;
          j["selected_lens"] = op.selected_lens;
        }
      }
    } else if (op.kind == AugOpKind::BlockUpdate) {
      j["first"] = op.first_seq;
      j["ts"] = op.ts.v;
      j["x"] = op.x_seq;
      j["h"] = op.h_seq;
    }
    os << j.dump() << "\n";
  }
}

inline Trace read_trace(std::istream& is) {
  Trace trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line);
    std::string type = j.at("type");
    if (type == "head") {
      trace.f = j.at("f");
      trace.m = j.at("m");
    } else if (type == "begin") {
      AugOpRec op;
      op.id = j.at("op");
      op.actor = j.at("actor");
      op.kind = j.at("kind") == "scan" ? AugOpKind::Scan : AugOpKind::BlockUpdate;
      if (op.kind == AugOpKind::BlockUpdate) {
        op.comps = j.at("comps").get<std::vector<int>>();
        op.values = j.at("values").get<std::vector<Value>>();
      }
      if (static_cast<size_t>(op.id) != trace.ops.size())
        fail(Errc::MalformedTrace, "op ids must be dense and ordered");
      trace.ops.push_back(op);
    } else if (type == "sw") {
      SwEventRec ev;
      ev.seq = j.at("seq");
      ev.actor = j.at("actor");
      ev.is_scan = j.at("kind") == "scan";
      ev.op_id = j.at("op");
      ev.post_lens = j.at("lens").get<std::vector<int>>();
      if (!ev.is_scan) {
        for (const auto& u : j.at("appended")) {
          UpdateTriple tri;
          tri.comp = u.at("c");
          tri.value = u.at("v");
          tri.ts.v = u.at("ts").get<std::vector<int>>();
          ev.appended.push_back(tri);
        }
        for (const auto& h : j.at("helps"))
          ev.helps.push_back({h.at("to"), h.at("idx"), h.at("src")});
      }
      if (ev.seq != static_cast<long>(trace.events.size()))
        fail(Errc::MalformedTrace, "event seqs must be dense and ordered");
      trace.events.push_back(ev);
    } else if (type == "end") {
      AugOpRec& op = trace.ops.at(j.at("op").get<int>());
      op.complete = j.at("complete");
      if (op.complete) {
        op.first_seq = j.at("first");
        op.last_seq = j.at("last");
        if (op.kind == AugOpKind::Scan) {
          op.result_view = view_from_json(j.at("view"));
          op.failures = j.at("failures");
          op.final_scan_seq = j.at("final_scan");
        } else {
          op.yielded = j.at("yield");
          op.ts.v = j.at("ts").get<std::vector<int>>();
          op.x_seq = j.at("x");
          op.h_seq = j.at("h");
          op.g_seq = j.at("g");
          op.hp_seq = j.at("hp");
          if (!op.yielded) {
            op.result_view = view_from_json(j.at("view"));
            op.read_seq = j.at("read");
            op.selected_lens = j.at("selected_lens").get<std::vector<int>>();
          }
        }
      } else if (op.kind == AugOpKind::BlockUpdate && j.contains("x")) {
        op.first_seq = j.at("first");
        op.ts.v = j.at("ts").get<std::vector<int>>();
        op.x_seq = j.at("x");
        op.h_seq = j.at("h");
      }
    } else {
      fail(Errc::MalformedTrace, "unknown record type: " + type);
    }
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Engine artifacts
// ---------------------------------------------------------------------------

inline void write_revisions(std::ostream& os, const EngineLog& log) {
  for (const auto& rev : log.revisions) {
    Json steps = Json::array();
    for (const auto& h : rev.xi) {
      if (h.is_scan)
        steps.push_back(Json{{"kind", "scan"}, {"view", h.view}});
      else
        steps.push_back(Json{{"kind", "update"}, {"c", h.comp}, {"v", h.value}});
    }
    Json j{{"type", "revision"}, {"sim", rev.sim},
           {"slot", rev.slot},   {"pid", rev.abs_pid},
           {"source_block", rev.source_block_op},
           {"trigger_scan", rev.trigger_scan_op},
           {"hidden", steps}};
    os << j.dump() << "\n";
  }
  for (const auto& tail : log.tails) {
    Json beta = Json::array();
    for (const auto& [pid, comp, value] : tail.beta)
      beta.push_back(Json{{"pid", pid}, {"c", comp}, {"v", value}});
    Json steps = Json::array();
    for (const auto& h : tail.xi) {
      if (h.is_scan)
        steps.push_back(Json{{"kind", "scan"}, {"view", h.view}});
      else
        steps.push_back(Json{{"kind", "update"}, {"c", h.comp}, {"v", h.value}});
    }
    Json j{{"type", "tail"}, {"sim", tail.sim}, {"beta", beta},
           {"xi_pid", tail.xi_pid}, {"hidden", steps}, {"output", tail.output}};
    os << j.dump() << "\n";
  }
}

inline const char* seg_name(SegKind seg) {
  switch (seg) {
    case SegKind::Alpha: return "alpha";
    case SegKind::Zeta: return "zeta";
    case SegKind::Gamma: return "gamma";
    case SegKind::Beta: return "beta";
    case SegKind::TailBeta: return "tail_beta";
    case SegKind::TailXi: return "tail_xi";
  }
  return "?";
}

inline void write_sigma(std::ostream& os, const SimExecution& sigma) {
  long seq = 0;
  for (const auto& st : sigma.steps) {
    Json j{{"seq", seq++},
           {"pid", st.pid},
           {"kind", st.tag == StepTag::Scan ? "scan" : "update"},
           {"seg", seg_name(st.seg)}};
    if (st.tag == StepTag::Scan)
      j["view_digest"] = digest(join(st.view, ","));
    else {
      j["c"] = st.comp;
      j["v"] = st.value;
    }
    os << j.dump() << "\n";
  }
}

inline void write_decomposition(std::ostream& os, const BlockDecomposition& decomp) {
  for (const auto& b : decomp.blocks) {
    Json j{{"type", "block"}, {"op", b.op_id},   {"sim", b.sim},
           {"t", b.t_pos},    {"z", b.z_pos},    {"len", b.len}};
    os << j.dump() << "\n";
  }
  for (const auto& v : decomp.violations.violations)
    os << Json{{"type", "violation"}, {"what", v}}.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Nondeterministic machine descriptions
// ---------------------------------------------------------------------------

inline void write_machine(std::ostream& os, const NDMachine& mach) {
  Json head{{"type", "machine"}, {"m", mach.m}, {"states", mach.num_states},
            {"initial_values", mach.initial_values}, {"initials", mach.initial_states}};
  os << head.dump() << "\n";
  for (int s = 0; s < mach.num_states; ++s) {
    Json j{{"type", "state"}, {"id", s}};
    if (mach.is_final(s)) {
      j["output"] = *mach.final_output[s];
    } else {
      if (mach.nu[s].is_scan) {
        j["step"] = "scan";
      } else {
        j["step"] = mach.nu[s].op.kind_name();
        j["comp"] = mach.nu[s].comp;
        j["arg"] = mach.nu[s].op.arg;
      }
      j["default"] = mach.delta_default[s];
    }
    j["expected"] = mach.expected[s];
    os << j.dump() << "\n";
  }
  for (const auto& [key, succs] : mach.delta) {
    Json j{{"type", "edge"}, {"state", key.first}, {"resp", key.second}, {"next", succs}};
    os << j.dump() << "\n";
  }
}

inline NDMachine read_machine(std::istream& is) {
  NDMachine mach;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line);
    std::string type = j.at("type");
    if (type == "machine") {
      mach.m = j.at("m");
      mach.num_states = j.at("states");
      mach.initial_values = j.at("initial_values").get<std::vector<Value>>();
      if (j.contains("initials")) mach.initial_states = j.at("initials").get<std::vector<int>>();
      mach.final_output.resize(mach.num_states);
      mach.nu.resize(mach.num_states);
      mach.expected.resize(mach.num_states);
      mach.delta_default.resize(mach.num_states);
    } else if (type == "state") {
      int s = j.at("id");
      mach.expected[s] = j.at("expected").get<std::vector<Value>>();
      if (j.contains("output")) {
        mach.final_output[s] = j.at("output").get<Value>();
        continue;
      }
      std::string step = j.at("step");
      if (step == "scan") {
        mach.nu[s] = {true, -1, {}};
      } else {
        CompOp op;
        if (step == "write") op.kind = CompOp::Kind::Write;
        else if (step == "writemax") op.kind = CompOp::Kind::WriteMax;
        else if (step == "fetchinc") op.kind = CompOp::Kind::FetchInc;
        else fail(Errc::BadParameters, "unknown step kind: " + step);
        if (j.contains("arg")) op.arg = j.at("arg").get<Value>();
        mach.nu[s] = {false, j.at("comp"), op};
      }
      mach.delta_default[s] = j.at("default").get<std::vector<int>>();
    } else if (type == "edge") {
      mach.delta[{j.at("state"), j.at("resp").get<std::string>()}] =
          j.at("next").get<std::vector<int>>();
    } else {
      fail(Errc::BadParameters, "unknown machine record: " + type);
    }
  }
  mach.validate();
  return mach;
}

}  // namespace snaplab
