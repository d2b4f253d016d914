#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "snaplab/common.hpp"

namespace snaplab {

enum class TaskKind { Consensus, KSet, EpsAgreement };

// A colorless decision task. Inputs/outputs are multisets of values;
// the validator is independent of which process produced which output.
struct ColorlessTask {
  TaskKind kind = TaskKind::Consensus;
  int k = 1;           // KSet only
  double eps = 0.0;    // EpsAgreement only

  static ColorlessTask consensus() { return {TaskKind::Consensus, 1, 0.0}; }

  static ColorlessTask k_set(int k) {
    if (k < 1) fail(Errc::BadParameters, "k-set agreement needs k >= 1");
    return {TaskKind::KSet, k, 0.0};
  }

  static ColorlessTask eps_agreement(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) fail(Errc::BadParameters, "eps must be in (0,1)");
    return {TaskKind::EpsAgreement, 1, eps};
  }

  const char* name() const {
    switch (kind) {
      case TaskKind::Consensus: return "consensus";
      case TaskKind::KSet: return "k-set";
      case TaskKind::EpsAgreement: return "eps-agreement";
    }
    return "?";
  }
};

// True iff `outputs` is a legal response to `inputs`. Outputs must be nonempty.
inline bool validate_task(const ColorlessTask& task, const std::vector<Value>& inputs,
                          const std::vector<Value>& outputs) {
  if (outputs.empty()) return false;
  switch (task.kind) {
    case TaskKind::Consensus: {
      for (const auto& o : outputs)
        if (o != outputs.front()) return false;
      return std::find(inputs.begin(), inputs.end(), outputs.front()) != inputs.end();
    }
    case TaskKind::KSet: {
      std::set<Value> distinct(outputs.begin(), outputs.end());
      if (static_cast<int>(distinct.size()) > task.k) return false;
      for (const auto& o : distinct)
        if (std::find(inputs.begin(), inputs.end(), o) == inputs.end()) return false;
      return true;
    }
    case TaskKind::EpsAgreement: {
      if (inputs.empty()) return false;
      double lo = value_as_real(inputs.front()), hi = lo;
      for (const auto& in : inputs) {
        double x = value_as_real(in);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      double omin = value_as_real(outputs.front()), omax = omin;
      for (const auto& o : outputs) {
        double y = value_as_real(o);
        omin = std::min(omin, y);
        omax = std::max(omax, y);
      }
      return omin >= lo && omax <= hi && (omax - omin) <= task.eps;
    }
  }
  return false;
}

}  // namespace snaplab
