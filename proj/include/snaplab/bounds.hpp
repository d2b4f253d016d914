#pragma once

#include <cmath>
#include <vector>

#include "snaplab/common.hpp"

namespace snaplab {

// ---------------------------------------------------------------------------
// Combinatorics of the simulation: block-update counts per construction
// level, per-simulator totals, the step bound, and the space lower-bound
// formulas the simulation yields.
// ---------------------------------------------------------------------------

inline long long binom(int n, int r) {
  if (r < 0 || r > n) return 0;
  long long acc = 1;
  for (int i = 0; i < r; ++i) acc = acc * (n - i) / (i + 1);
  return acc;
}

// a(1) = 0; a(r) = (C(m,r-1)+1) a(r-1) + C(m,r-1).
// Index 1..m (entry 0 unused).
inline std::vector<long long> a_table(int m) {
  if (m < 1) fail(Errc::BadParameters, "m must be positive");
  std::vector<long long> a(m + 1, 0);
  for (int r = 2; r <= m; ++r) a[r] = (binom(m, r - 1) + 1) * a[r - 1] + binom(m, r - 1);
  return a;
}

// Closed form b(i) = a(m) (a(m-1)+1)^(i-1).
inline long long b_closed(int m, int i) {
  if (i < 1) fail(Errc::BadParameters, "i must be positive");
  auto a = a_table(m);
  long long am = a[m];
  long long base = (m >= 2 ? a[m - 1] : 0) + 1;
  long long out = am;
  for (int k = 1; k < i; ++k) out *= base;
  return out;
}

// Equivalent recurrence: b(1) = a(m); b(i) = a(m-1) * sum_{j<i} b(j) + a(m).
// Evaluated directly as an independent route to the same numbers.
inline std::vector<long long> b_recurrence(int m, int imax) {
  auto a = a_table(m);
  long long am1 = (m >= 2 ? a[m - 1] : 0);
  std::vector<long long> b(imax + 1, 0);
  long long sum = 0;
  for (int i = 1; i <= imax; ++i) {
    b[i] = am1 * sum + a[m];
    sum += b[i];
  }
  return b;
}

// Steps available to each simulator in a covering-only run.
inline long long step_bound(int f, int m) { return (2LL * f + 7) * b_closed(m, f) + 3; }

struct BoundsReport {
  int m = 0;
  int f = 0;
  std::vector<long long> a;          // a[1..m]
  std::vector<long long> b;          // b[1..f], closed form
  long long steps = 0;               // (2f+7) b(f) + 3
};

inline BoundsReport bounds_report(int m, int f) {
  if (m < 1 || f < 1) fail(Errc::BadParameters, "m and f must be positive");
  BoundsReport rep;
  rep.m = m;
  rep.f = f;
  rep.a = a_table(m);
  rep.b.assign(f + 1, 0);
  for (int i = 1; i <= f; ++i) rep.b[i] = b_closed(m, i);
  rep.steps = step_bound(f, m);
  return rep;
}

// Registers needed for x-obstruction-free k-set agreement among n processes:
// floor((n-x)/(k+1-x)) + 1.
inline long long kset_space_bound(long long n, long long k, long long x) {
  if (!(1 <= x && x <= k && k < n)) fail(Errc::BadParameters, "need 1 <= x <= k < n");
  return (n - x) / (k + 1 - x) + 1;
}

struct EpsBound {
  double by_processes = 0;  // floor(n/2) + 1
  double by_steps = 0;      // sqrt(log2(log3(1/eps)) - 2)
  double bound = 0;         // min of the two
};

// Registers needed for obstruction-free eps-approximate agreement:
// min{ floor(n/2)+1, sqrt(log2 log3 (1/eps) - 2) }.
inline EpsBound eps_space_bound(long long n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(Errc::BadParameters, "eps must be in (0,1)");
  if (n < 2) fail(Errc::BadParameters, "n must be at least 2");
  EpsBound out;
  out.by_processes = static_cast<double>(n / 2 + 1);
  out.by_steps = std::sqrt(std::log2(std::log(1.0 / eps) / std::log(3.0)) - 2.0);
  out.bound = std::min(out.by_processes, out.by_steps);
  return out;
}

// General form behind the eps bound: min{ floor(n/f)+1, sqrt(log2(L/f)) }
// where L lower-bounds the wait-free step complexity among f processes.
inline double general_space_bound(long long n, long long f, double L) {
  if (f < 1 || n < f) fail(Errc::BadParameters, "need 1 <= f <= n");
  double by_proc = static_cast<double>(n / f + 1);
  double by_steps = std::sqrt(std::log2(L / static_cast<double>(f)));
  return std::min(by_proc, by_steps);
}

}  // namespace snaplab
