#include "indet/nevanlinna.hpp"

#include <algorithm>
#include <cmath>

#include "indet/detail/recurrence.hpp"

namespace indet {

namespace {

template <class Real>
NevQuad partial_impl(const JacobiCoefficients& src, cplx u, cplx v, std::size_t n) {
  using C = complex_t<Real>;
  const TruncationPolicy no_stop;
  const auto eu = detail::recur<Real>(src, lift<Real>(u), n + 1, no_stop, false);
  const auto ev = (u == v) ? eu : detail::recur<Real>(src, lift<Real>(v), n + 1, no_stop, false);

  C sqq(Real(0)), spq(Real(0)), sqp(Real(0)), spp(Real(0));
  for (std::size_t k = 0; k <= n; ++k) {
    sqq += eu.q[k] * ev.q[k];
    spq += eu.p[k] * ev.q[k];
    sqp += eu.q[k] * ev.p[k];
    spp += eu.p[k] * ev.p[k];
  }
  const C d = lift<Real>(u) - lift<Real>(v);
  NevQuad out;
  out.u = u;
  out.v = v;
  out.N = n;
  const C A = d * sqq;
  const C B = C(Real(-1)) + d * spq;
  const C Cv = C(Real(1)) + d * sqp;
  const C D = d * spp;
  out.A = lower(A);
  out.B = lower(B);
  out.C = lower(Cv);
  out.D = lower(D);

  const C an(Real(src.coeffs(n).a));
  const C Ac = an * (eu.q[n + 1] * ev.q[n] - eu.q[n] * ev.q[n + 1]);
  const C Bc = an * (eu.p[n + 1] * ev.q[n] - eu.p[n] * ev.q[n + 1]);
  const C Cc = an * (eu.q[n + 1] * ev.p[n] - eu.q[n] * ev.p[n + 1]);
  const C Dc = an * (eu.p[n + 1] * ev.p[n] - eu.p[n] * ev.p[n + 1]);
  out.cross_err = std::max({std::abs(lower(C(A - Ac))), std::abs(lower(C(B - Bc))),
                            std::abs(lower(C(Cv - Cc))), std::abs(lower(C(D - Dc)))});
  return out;
}

std::size_t shared_n(const JacobiCoefficients& src, std::initializer_list<std::pair<cplx, cplx>> pairs,
                     const TruncationPolicy& pol, bool* converged) {
  if (pol.fixed_n) {
    if (converged) {
      bool all = true;
      TruncationPolicy free = pol;
      free.fixed_n.reset();
      free.n_max = std::max(pol.n_max, *pol.fixed_n);
      for (const auto& [a, b] : pairs) {
        bool c = false;
        all = all && nev_stop_index(src, a, b, free, &c) <= *pol.fixed_n && c;
      }
      *converged = all;
    }
    return *pol.fixed_n;
  }
  std::size_t N = 0;
  bool all = true;
  for (const auto& [a, b] : pairs) {
    bool c = false;
    N = std::max(N, nev_stop_index(src, a, b, pol, &c));
    all = all && c;
  }
  if (converged) *converged = all;
  return N;
}

}  // namespace

double NevQuad::det_residual() const { return std::abs(A * D - B * C - 1.0); }

NevQuad nev_partial(const JacobiCoefficients& src, cplx u, cplx v, std::size_t n,
                    Precision precision) {
  if (precision == Precision::extended) return partial_impl<ext_real>(src, u, v, n);
  return partial_impl<double>(src, u, v, n);
}

std::size_t nev_stop_index(const JacobiCoefficients& src, cplx u, cplx v,
                           const TruncationPolicy& pol, bool* converged) {
  pol.validate();
  const TruncationPolicy no_stop;
  const auto eu = detail::recur<double>(src, u, pol.n_max, no_stop, false);
  const auto ev = (u == v) ? eu : detail::recur<double>(src, v, pol.n_max, no_stop, false);
  const cplx d = u - v;

  std::array<cplx, 4> value{0.0, -1.0, 1.0, 0.0};
  std::array<double, 4> prev_inc{0.0, 0.0, 0.0, 0.0};
  std::array<std::optional<std::size_t>, 4> stop{};
  for (std::size_t k = 0; k <= pol.n_max; ++k) {
    const std::array<cplx, 4> inc{d * eu.q[k] * ev.q[k], d * eu.p[k] * ev.q[k],
                                  d * eu.q[k] * ev.p[k], d * eu.p[k] * ev.p[k]};
    bool all = true;
    for (std::size_t s = 0; s < 4; ++s) {
      value[s] += inc[s];
      const double last = std::max(std::abs(inc[s]), prev_inc[s]);
      prev_inc[s] = std::abs(inc[s]);
      if (!stop[s] && k >= detail::kMinStopIndex &&
          pol.safety * last < pol.tail_tol * (1.0 + std::abs(value[s]))) {
        stop[s] = k;
      }
      all = all && stop[s].has_value();
    }
    if (all) break;
  }
  std::size_t N = 0;
  bool ok = true;
  for (const auto& s : stop) {
    N = std::max(N, s.value_or(pol.n_max));
    ok = ok && s.has_value();
  }
  if (converged) *converged = ok;
  return N;
}

NevQuad nev(const JacobiCoefficients& src, cplx u, cplx v, const TruncationPolicy& pol) {
  bool conv = false;
  const std::size_t N = shared_n(src, {{u, v}}, pol, &conv);
  NevQuad q = nev_partial(src, u, v, N, pol.precision);
  q.converged = conv;
  return q;
}

NevQuad nev_one(const JacobiCoefficients& src, cplx u, const TruncationPolicy& pol) {
  return nev(src, u, 0.0, pol);
}

NevQuad reconstruct_two_var(const JacobiCoefficients& src, cplx u, cplx v,
                            const TruncationPolicy& pol) {
  const NevQuad direct = nev(src, u, v, pol);
  const NevQuad a = nev_partial(src, u, 0.0, direct.N, pol.precision);
  const NevQuad b = nev_partial(src, v, 0.0, direct.N, pol.precision);
  NevQuad out;
  out.u = u;
  out.v = v;
  out.N = direct.N;
  out.converged = direct.converged;
  out.A = a.A * b.C - b.A * a.C;
  out.B = a.B * b.C - b.A * a.D;
  out.C = a.A * b.D - b.B * a.C;
  out.D = a.B * b.D - b.B * a.D;
  out.cross_err = std::max({std::abs(out.A - direct.A), std::abs(out.B - direct.B),
                            std::abs(out.C - direct.C), std::abs(out.D - direct.D)});
  return out;
}

double three_point_residual(const JacobiCoefficients& src, cplx u, cplx v, cplx w,
                            const TruncationPolicy& pol) {
  const std::size_t N = shared_n(src, {{u, v}, {u, w}, {w, v}}, pol, nullptr);
  const NevQuad uv = nev_partial(src, u, v, N, pol.precision);
  const NevQuad uw = nev_partial(src, u, w, N, pol.precision);
  const NevQuad wv = nev_partial(src, w, v, N, pol.precision);
  return std::max({std::abs(uv.A - (uw.C * wv.A - uw.A * wv.B)),
                   std::abs(uv.B - (uw.D * wv.A - uw.B * wv.B)),
                   std::abs(uv.C - (uw.C * wv.C - uw.A * wv.D)),
                   std::abs(uv.D - (uw.D * wv.C - uw.B * wv.D))});
}

Mat2 Mat2::inverse() const {
  const cplx d = det();
  if (d == cplx{}) throw DomainError("singular 2x2 matrix");
  return {{m[3] / d, -m[1] / d, -m[2] / d, m[0] / d}};
}

double Mat2::max_abs() const {
  double r = 0.0;
  for (const auto& x : m) r = std::max(r, std::abs(x));
  return r;
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {{x.m[0] * y.m[0] + x.m[1] * y.m[2], x.m[0] * y.m[1] + x.m[1] * y.m[3],
           x.m[2] * y.m[0] + x.m[3] * y.m[2], x.m[2] * y.m[1] + x.m[3] * y.m[3]}};
}

Mat2 operator-(const Mat2& x, const Mat2& y) {
  return {{x.m[0] - y.m[0], x.m[1] - y.m[1], x.m[2] - y.m[2], x.m[3] - y.m[3]}};
}

TransferMatrix transfer(const JacobiCoefficients& src, cplx u, cplx v, std::size_t n,
                        Precision precision) {
  const NevQuad q = nev_partial(src, u, v, n, precision);
  return {{{q.C, q.A, -q.D, -q.B}}, u, v, n};
}

double transfer_residual(const JacobiCoefficients& src, cplx u, cplx v, std::size_t n) {
  const PolyEval eu = eval_pq_fixed(src, u, n + 1);
  const PolyEval ev = eval_pq_fixed(src, v, n + 1);
  const Mat2 Pu{{eu.p[n], eu.q[n], eu.p[n + 1], eu.q[n + 1]}};
  const Mat2 Pv{{ev.p[n], ev.q[n], ev.p[n + 1], ev.q[n + 1]}};
  const Mat2 h = transfer(src, u, v, n).entries;
  return (Pu * h - Pv).max_abs() / std::max(1.0, Pv.max_abs());
}

cplx ExtComplex::value() const {
  if (!value_) throw DomainError("value at infinity");
  return *value_;
}

ExtComplex mobius_apply(const NevQuad& quad, ExtComplex z) {
  cplx num;
  cplx den;
  if (z.is_infinite()) {
    num = quad.C;
    den = -quad.D;
  } else {
    num = quad.C * z.value() + quad.A;
    den = -quad.D * z.value() - quad.B;
  }
  if (den == cplx{}) return ExtComplex::infinity();
  return num / den;
}

ExtComplex mobius(const JacobiCoefficients& src, cplx u, cplx v, ExtComplex z,
                  const TruncationPolicy& pol) {
  return mobius_apply(nev(src, u, v, pol), z);
}

double tilde_relations_residual(const JacobiCoefficients& src, cplx u, cplx v,
                                const TruncationPolicy& pol) {
  const std::size_t N = std::max<std::size_t>(shared_n(src, {{u, v}, {u, 0.0}}, pol, nullptr), 1);
  const JacobiCoefficients tsrc = src.truncate_once();
  const Coeff c0 = src.coeffs(0);
  const double a2 = c0.a * c0.a;
  const double b0 = c0.b;

  const NevQuad two = nev_partial(src, u, v, N, pol.precision);
  const NevQuad one = nev_partial(src, u, 0.0, N, pol.precision);
  const NevQuad ttwo = nev_partial(tsrc, u, v, N - 1, pol.precision);
  const NevQuad tone = nev_partial(tsrc, u, 0.0, N - 1, pol.precision);

  return std::max({std::abs(one.A - tone.D / a2), std::abs(one.C + b0 * tone.D / a2 + tone.B),
                   std::abs(ttwo.D - a2 * two.A),
                   std::abs(ttwo.B - ((v - b0) * two.A - two.C))});
}

NevanlinnaSlice::NevanlinnaSlice(const JacobiCoefficients& src, cplx v, std::size_t N,
                                 Precision precision)
    : src_(src), v_(v), N_(N), precision_(precision), tab_(src.table(N)) {
  const PolyEval ev = eval_pq_fixed(src, v, N);
  pv_ = ev.p;
  qv_ = ev.q;
}

NevQuad NevanlinnaSlice::at(cplx u) const {
  if (precision_ == Precision::extended) return at_extended(u);
  cplx p_prev = 0.0, p = 1.0, q_prev = 0.0, q = 0.0;
  cplx sqq = 0.0, spq = 0.0, sqp = 0.0, spp = 1.0 * pv_[0];
  for (std::size_t k = 1; k <= N_; ++k) {
    const Coeff& c = tab_[k - 1];
    const double a_before = k >= 2 ? tab_[k - 2].a : 0.0;
    const cplx pn = ((u - c.b) * p - a_before * p_prev) / c.a;
    const cplx qn = k == 1 ? cplx(1.0 / c.a) : ((u - c.b) * q - a_before * q_prev) / c.a;
    p_prev = p;
    p = pn;
    q_prev = q;
    q = qn;
    sqq += q * qv_[k];
    spq += p * qv_[k];
    sqp += q * pv_[k];
    spp += p * pv_[k];
  }
  if (!std::isfinite(std::abs(p)) || !std::isfinite(std::abs(spp))) {
    throw OverflowError("evaluation overflow; reduce |z| or use higher precision");
  }
  const cplx d = u - v_;
  NevQuad out;
  out.u = u;
  out.v = v_;
  out.N = N_;
  out.A = d * sqq;
  out.B = -1.0 + d * spq;
  out.C = 1.0 + d * sqp;
  out.D = d * spp;
  return out;
}

NevQuad NevanlinnaSlice::at_extended(cplx u) const {
  return nev_partial(src_, u, v_, N_, Precision::extended);
}

cplx NevanlinnaSlice::kernel_pp(cplx u) const {
  const PolyEval eu = eval_pq_fixed(src_, u, N_);
  cplx s = 0.0;
  for (std::size_t k = 0; k <= N_; ++k) s += eu.p[k] * pv_[k];
  return s;
}

cplx NevanlinnaSlice::kernel_qq(cplx u) const {
  const PolyEval eu = eval_pq_fixed(src_, u, N_);
  cplx s = 0.0;
  for (std::size_t k = 0; k <= N_; ++k) s += eu.q[k] * qv_[k];
  return s;
}

}  // namespace indet
