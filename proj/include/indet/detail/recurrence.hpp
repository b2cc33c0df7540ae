#pragma once

// Precision-generic three-term recurrence kernel shared by the evaluation
// routines. Real is double or ext_real.

#include <cmath>
#include <cstddef>
#include <vector>

#include "indet/jacobi.hpp"
#include "indet/precision.hpp"

namespace indet::detail {

template <class Real>
struct BasicPolyEval {
  using C = complex_t<Real>;
  C z;
  std::vector<C> p;
  std::vector<C> q;
  Real cum_p2 = 0;
  Real cum_q2 = 0;
  std::size_t N = 0;
  Real tail_est = 0;
  bool converged = false;
};

inline constexpr std::size_t kMinStopIndex = 8;

/// Runs the recurrence up to index `n_last`, or stops at the first index
/// where the stop rule holds when `use_stop_rule` is set.
template <class Real>
BasicPolyEval<Real> recur(const JacobiCoefficients& src, complex_t<Real> z, std::size_t n_last,
                          const TruncationPolicy& pol, bool use_stop_rule) {
  using C = complex_t<Real>;
  using std::norm;
  BasicPolyEval<Real> ev;
  ev.z = z;
  ev.p.reserve(n_last + 1);
  ev.q.reserve(n_last + 1);

  const Coeff c0 = src.coeffs(0);
  ev.p.push_back(C(Real(1)));
  ev.q.push_back(C(Real(0)));
  Real cum = 1;
  ev.cum_p2 = 1;
  std::size_t n = 0;
  Real a_prev = Real(c0.a);
  if (n_last >= 1) {
    ev.p.push_back((z - C(Real(c0.b))) / C(a_prev));
    ev.q.push_back(C(Real(1) / a_prev));
    n = 1;
    ev.cum_p2 += norm(ev.p[1]);
    ev.cum_q2 += norm(ev.q[1]);
  }
  Real inc_prev = 1;
  Real inc_cur = n == 1 ? norm(ev.p[1]) + norm(ev.q[1]) : Real(1);
  cum = ev.cum_p2 + ev.cum_q2;
  bool stopped = false;
  auto rule = [&] {
    const Real last = inc_cur > inc_prev ? inc_cur : inc_prev;
    return n >= kMinStopIndex && Real(pol.safety) * last < Real(pol.tail_tol) * cum;
  };
  if (use_stop_rule && rule()) stopped = true;
  while (!stopped && n < n_last) {
    const Coeff cn = src.coeffs(n);
    const Real an(cn.a);
    const C zb = z - C(Real(cn.b));
    const C pn = (zb * ev.p[n] - C(a_prev) * ev.p[n - 1]) / C(an);
    const C qn = (zb * ev.q[n] - C(a_prev) * ev.q[n - 1]) / C(an);
    ev.p.push_back(pn);
    ev.q.push_back(qn);
    ++n;
    a_prev = an;
    const Real np = norm(pn);
    const Real nq = norm(qn);
    if (!std::isfinite(lower(np)) || !std::isfinite(lower(nq))) {
      throw OverflowError("evaluation overflow; reduce |z| or use higher precision");
    }
    ev.cum_p2 += np;
    ev.cum_q2 += nq;
    cum += np + nq;
    inc_prev = inc_cur;
    inc_cur = np + nq;
    if (use_stop_rule && rule()) stopped = true;
  }
  ev.N = n;
  ev.tail_est = inc_cur;
  ev.converged = rule();
  return ev;
}

template <class Real>
PolyEval to_double(const BasicPolyEval<Real>& ev) {
  PolyEval out;
  out.z = lower(ev.z);
  out.p.reserve(ev.p.size());
  out.q.reserve(ev.q.size());
  for (const auto& v : ev.p) out.p.push_back(lower(v));
  for (const auto& v : ev.q) out.q.push_back(lower(v));
  out.cum_p2 = lower(ev.cum_p2);
  out.cum_q2 = lower(ev.cum_q2);
  out.N = ev.N;
  out.tail_est = lower(ev.tail_est);
  out.converged = ev.converged;
  return out;
}

}  // namespace indet::detail
