#include "indet/debranges.hpp"

#include <algorithm>
#include <cmath>

#include "indet/nevanlinna.hpp"
#include "indet/rng.hpp"

namespace indet {

cplx F_eval(const JacobiCoefficients& src, const SeqVector& c, cplx z, const TruncationPolicy& pol) {
  if (c.entries.empty()) return 0.0;
  const PolyEval ev = eval_pq_fixed(src, z, c.M(), pol);
  cplx s = 0.0;
  for (std::size_t n = 0; n <= c.M(); ++n) s += c[n] * ev.p[n];
  return s;
}

cplx G_eval(const JacobiCoefficients& src, const SeqVector& c, cplx z, const TruncationPolicy& pol) {
  if (c.entries.empty()) return 0.0;
  const PolyEval ev = eval_pq_fixed(src, z, c.M(), pol);
  cplx s = 0.0;
  for (std::size_t n = 0; n <= c.M(); ++n) s += c[n] * ev.q[n];
  return s;
}

cplx kernel(const JacobiCoefficients& src, cplx u, cplx v, const TruncationPolicy& pol) {
  pol.validate();
  std::size_t N = 0;
  if (pol.fixed_n) {
    N = *pol.fixed_n;
  } else {
    bool conv = false;
    N = nev_stop_index(src, u, v, pol, &conv);
    if (!conv) throw ConvergenceError("kernel series did not settle before the truncation cap");
  }
  const PolyEval eu = eval_pq_fixed(src, u, N, pol);
  const PolyEval ev = eval_pq_fixed(src, v, N, pol);
  cplx s = 0.0;
  for (std::size_t k = 0; k <= N; ++k) s += eu.p[k] * ev.p[k];
  return s;
}

CoeffMatrix coeff_matrix(const JacobiCoefficients& src, cplx z0, std::size_t N,
                         const TruncationPolicy& pol, std::uint64_t seed) {
  if (N < 1) throw Error("coefficient matrix needs N >= 1");
  const PolyEval e0 = eval_pq_fixed(src, z0, N, pol);
  CoeffMatrix m;
  m.z0 = z0;
  m.N = N;
  m.rows.resize(N + 1);
  for (std::size_t n = 1; n <= N; ++n) {
    m.rows[n].resize(n);
    for (std::size_t k = 0; k < n; ++k) m.rows[n][k] = e0.q[n] * e0.p[k] - e0.p[n] * e0.q[k];
  }

  Rng rng(seed);
  cplx z = z0;
  while (std::abs(z - z0) < 0.05) z = z0 + rng.in_disk(1.0);
  const PolyEval ez = eval_pq_fixed(src, z, N, pol);
  for (std::size_t n = 1; n <= N; ++n) {
    const cplx lhs = (ez.p[n] - e0.p[n]) / (z - z0);
    cplx rhs = 0.0;
    for (std::size_t k = 0; k < n; ++k) rhs += m.rows[n][k] * ez.p[k];
    m.expansion_residual = std::max(m.expansion_residual, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  if (!(m.expansion_residual < 1e-9)) {
    throw Error("difference-quotient expansion check failed for the coefficient matrix");
  }
  return m;
}

SeqVector xi_apply(const JacobiCoefficients& src, const SeqVector& c, cplx z0,
                   const TruncationPolicy& pol) {
  SeqVector out;
  out.support = c.support;
  const std::size_t M = c.M();
  if (M == 0) return out;
  const PolyEval e0 = eval_pq_fixed(src, z0, M, pol);
  out.entries.assign(M, cplx{});
  // xi_k = p_k sum_{n>k} c_n q_n - q_k sum_{n>k} c_n p_n
  cplx sq = 0.0, sp = 0.0;
  for (std::size_t k = M; k-- > 0;) {
    sq += c[k + 1] * e0.q[k + 1];
    sp += c[k + 1] * e0.p[k + 1];
    out.entries[k] = e0.p[k] * sq - e0.q[k] * sp;
  }
  return out;
}

double resolvent_residual(const JacobiCoefficients& src, const SeqVector& c, cplx z0,
                          const TruncationPolicy& pol) {
  const SeqVector xi = xi_apply(src, c, z0, pol);
  SeqVector r = apply_jacobi(src, xi) - z0 * xi;
  r += F_eval(src, c, z0, pol) * SeqVector::unit(0);
  r = r - c;
  return r.norm() / std::max(1.0, c.norm());
}

double diff_quotient_residual(const JacobiCoefficients& src, const SeqVector& c, cplx z0, cplx z,
                              const TruncationPolicy& pol) {
  cplx quotient;
  if (z == z0) {
    const double h = 1e-5 * (1.0 + std::abs(z0));
    quotient = (F_eval(src, c, z0 + h, pol) - F_eval(src, c, z0 - h, pol)) / (2.0 * h);
  } else {
    quotient = (F_eval(src, c, z, pol) - F_eval(src, c, z0, pol)) / (z - z0);
  }
  return std::abs(quotient - F_eval(src, xi_apply(src, c, z0, pol), z, pol));
}

bool BoundReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.ok; });
}

namespace {

void record(BoundCheck& b, double lhs, double rhs) {
  ++b.samples;
  const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
  if (b.samples == 1 || ratio > b.max_ratio) {
    b.max_ratio = ratio;
    b.lhs = lhs;
    b.rhs = rhs;
  }
  b.ok = b.max_ratio <= 1.0 + 1e-10;
}

}  // namespace

BoundReport bound_suite(const JacobiCoefficients& src, cplx z0, const TruncationPolicy& pol,
                        std::uint64_t seed, int unit_vectors) {
  pol.validate();
  const std::size_t N = pol.working_n();
  const PolyEval e0 = eval_pq_fixed(src, z0, N, pol);
  const double norms = e0.cum_p2 + e0.cum_q2;
  std::vector<double> w(N + 1);
  for (std::size_t n = 0; n <= N; ++n) w[n] = std::norm(e0.p[n]) + std::norm(e0.q[n]);

  BoundReport rep;
  rep.z0 = z0;
  rep.N = N;
  BoundCheck entry{"|a_nk|^2 <= (|p_n|^2+|q_n|^2)(|p_k|^2+|q_k|^2)"};
  BoundCheck row{"sum_n |a_nk|^2 <= (||p||^2+||q||^2)(|p_k|^2+|q_k|^2)"};
  std::vector<double> row_sum(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) {
    for (std::size_t k = 0; k < n; ++k) {
      const double a2 = std::norm(e0.q[n] * e0.p[k] - e0.p[n] * e0.q[k]);
      record(entry, a2, w[n] * w[k]);
      row_sum[k] += a2;
    }
  }
  for (std::size_t k = 0; k < N; ++k) record(row, row_sum[k], norms * w[k]);

  BoundCheck dif{"sum_n |(p_n(z)-p_n(z0))/(z-z0)|^2 <= ||p_z||^2 (||p||^2+||q||^2)^2"};
  Rng rng(seed);
  std::vector<cplx> zs{z0 + 0.1};
  for (int i = 0; i < 10; ++i) zs.push_back(z0 + rng.in_disk(2.0));
  for (const cplx z : zs) {
    if (z == z0) continue;
    const PolyEval ez = eval_pq_fixed(src, z, N, pol);
    double lhs = 0.0;
    for (std::size_t n = 0; n <= N; ++n) lhs += std::norm((ez.p[n] - e0.p[n]) / (z - z0));
    record(dif, lhs, ez.cum_p2 * norms * norms);
  }

  BoundCheck nxi{"||xi(c)|| <= ||c|| (||p||^2+||q||^2)"};
  for (int i = 0; i < unit_vectors; ++i) {
    const std::size_t M = 1 + rng.below(std::min<std::size_t>(N, 100));
    std::vector<cplx> e(M + 1);
    for (auto& x : e) x = rng.in_disk(1.0);
    SeqVector c(e);
    c *= 1.0 / c.norm();
    record(nxi, xi_apply(src, c, z0, pol).norm(), norms);
  }
  rep.checks = {entry, row, dif, nxi};
  return rep;
}

}  // namespace indet
