#include "indet/domains.hpp"

#include <algorithm>
#include <cmath>

namespace indet {

namespace {

void check_basepoint(cplx z0) {
  if (!(std::imag(z0) > 0.0)) throw DomainError("invalid basepoint: need Im z0 > 0");
}

// 2i Im(z0) ||p_{z0}||^2 at the working truncation.
cplx residue_scale(const PolyEval& pz, cplx z0, std::size_t N) {
  double s = 0.0;
  for (std::size_t k = 0; k <= N; ++k) s += std::norm(pz.p[k]);
  return cplx(0.0, 2.0 * std::imag(z0)) * s;
}

}  // namespace

Residues residues(const JacobiCoefficients& src, const SeqVector& v, cplx z0,
                  const TruncationPolicy& pol) {
  check_basepoint(z0);
  pol.validate();
  const std::size_t N = pol.working_n();
  Residues r;
  r.z0 = z0;
  r.N = N;
  r.norm_input = v.norm();
  if (v.entries.empty()) return r;

  // Rows of (J - zeta) v determined by the stored entries.
  const std::size_t M = v.M();
  if (v.truncated() && M == 0) return r;
  const std::size_t last_row = v.truncated() ? M - 1 : M + 1;
  const PolyEval pz = eval_pq_fixed(src, z0, std::max(N, last_row));
  const SeqVector jv = apply_jacobi(src, v);
  cplx num_a = 0.0, num_b = 0.0;
  for (std::size_t n = 0; n <= last_row; ++n) {
    num_a += (jv[n] - std::conj(z0) * v[n]) * std::conj(pz.p[n]);
    num_b += (jv[n] - z0 * v[n]) * pz.p[n];
  }
  const cplx scale = residue_scale(pz, z0, N);
  r.alpha = num_a / scale;
  r.beta = num_b / -scale;
  return r;
}

SeqVector truncated_p(const JacobiCoefficients& src, cplx lambda, const TruncationPolicy& pol) {
  return p_vector(eval_pq_fixed(src, lambda, pol.working_n() + 1));
}

SeqVector truncated_q(const JacobiCoefficients& src, cplx lambda, const TruncationPolicy& pol) {
  return q_vector(eval_pq_fixed(src, lambda, pol.working_n() + 1));
}

SeqVector extension_generator(const JacobiCoefficients& src, const ExtensionParam& t,
                              const TruncationPolicy& pol) {
  if (t.is_infinite()) return truncated_p(src, 0.0, pol);
  return truncated_q(src, 0.0, pol) + t.value() * truncated_p(src, 0.0, pol);
}

SRCoefficients s_r_coefficients(const JacobiCoefficients& src, cplx lambda, cplx z0,
                                const TruncationPolicy& pol) {
  check_basepoint(z0);
  pol.validate();
  const std::size_t N = pol.working_n();
  const cplx scale = residue_scale(eval_pq_fixed(src, z0, N), z0, N);
  const NevQuad bar = nev_partial(src, lambda, std::conj(z0), N, pol.precision);
  const NevQuad at = nev_partial(src, lambda, z0, N, pol.precision);
  return {bar.D / scale, at.D / -scale, bar.C / scale, at.C / -scale};
}

namespace {

double dt_residual(const Residues& r) {
  return std::max(std::abs(r.alpha), std::abs(r.beta)) / std::max(1.0, r.norm_input);
}

double dtt_residual(const Residues& r, const Residues& g) {
  const double gn = std::hypot(std::abs(g.alpha), std::abs(g.beta));
  return std::abs(r.alpha * g.beta - r.beta * g.alpha) / (std::max(1.0, r.norm_input) * gn);
}

MembershipVerdict decide(double res, double res_alt, double tol, std::string tag, std::size_t N,
                         bool degenerate) {
  const bool a = res < tol, b = res_alt < tol;
  if (a != b) throw InconclusiveError("inconclusive: tighten truncation");
  MembershipVerdict v;
  v.in_domain = a;
  v.residual = res;
  v.residual_alt = res_alt;
  v.tol = tol;
  v.domain_tag = std::move(tag);
  v.N = N;
  v.degenerate = degenerate;
  return v;
}

}  // namespace

MembershipVerdict membership_DT(const JacobiCoefficients& src, const SeqVector& v,
                                const TruncationPolicy& pol, double tol, cplx z0, cplx z0_alt) {
  const Residues r = residues(src, v, z0, pol);
  const Residues r2 = residues(src, v, z0_alt, pol);
  return decide(dt_residual(r), dt_residual(r2), tol, "D(T)", r.N, v.is_zero());
}

MembershipVerdict membership_DTt(const JacobiCoefficients& src, const SeqVector& v,
                                 const ExtensionParam& t, const TruncationPolicy& pol, double tol,
                                 cplx z0, cplx z0_alt) {
  const SeqVector g = extension_generator(src, t, pol);
  const double res = dtt_residual(residues(src, v, z0, pol), residues(src, g, z0, pol));
  const double res2 = dtt_residual(residues(src, v, z0_alt, pol), residues(src, g, z0_alt, pol));
  return decide(res, res2, tol, "D(T_t), t=" + t.str(), pol.working_n(), v.is_zero());
}

std::optional<cplx> pair_coefficient(const JacobiCoefficients& src, cplx u, cplx v,
                                     PairCase which, const TruncationPolicy& pol, double tol) {
  if (u == v) return std::nullopt;
  pol.validate();
  const NevQuad q = nev_partial(src, u, v, pol.working_n(), pol.precision);
  switch (which) {
    case PairCase::pp:
      if (std::abs(q.D) < tol) return q.B;
      break;
    case PairCase::qq:
      if (std::abs(q.A) < tol) return -q.C;
      break;
    case PairCase::pq:
      if (std::abs(q.B) < tol) return -q.D;
      break;
  }
  return std::nullopt;
}

SeqVector pair_vector(const JacobiCoefficients& src, cplx u, cplx v, cplx coeff, PairCase which,
                      const TruncationPolicy& pol) {
  switch (which) {
    case PairCase::pp:
      return truncated_p(src, u, pol) + coeff * truncated_p(src, v, pol);
    case PairCase::qq:
      return truncated_q(src, u, pol) + coeff * truncated_q(src, v, pol);
    case PairCase::pq:
      break;
  }
  return truncated_p(src, u, pol) + coeff * truncated_q(src, v, pol);
}

ResolventCombination resolvent_combination(const JacobiCoefficients& src, const ExtensionParam& t,
                                           cplx lambda, const DiscreteMeasure& measure,
                                           const TruncationPolicy& pol, double tol,
                                           double refine_tol) {
  ResolventCombination out;
  out.w = stieltjes(src, t, lambda, measure, pol, refine_tol).w_param;
  const SeqVector v = out.w * truncated_p(src, lambda, pol) + truncated_q(src, lambda, pol);
  out.verdict = membership_DTt(src, v, t, pol, tol);
  out.in_DT = membership_DT(src, v, pol, tol);
  const NevQuad one = nev_partial(src, lambda, 0.0, pol.working_n(), pol.precision);
  out.c_coeff = t.is_infinite() ? -1.0 / one.D : -1.0 / (one.B + t.value() * one.D);
  out.remainder = membership_DT(src, v - out.c_coeff * extension_generator(src, t, pol), pol, tol);
  return out;
}

}  // namespace indet
