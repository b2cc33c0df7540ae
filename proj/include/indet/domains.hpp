#pragma once

// Deficiency residues and numerical membership in D(T) and D(T_t).
//
// A vector of D(T*) splits uniquely as D(T) + alpha p_{z0} + beta p_{conj z0};
// membership in D(T) means both residues vanish. Residues are normalised by
// ||p_{z0}||^2 at the working truncation N = pol.working_n(), and the
// truncated vectors p_lambda, q_lambda carry indices 0..N+1, so the residue
// numerators are exactly the partial Nevanlinna functions at N.

#include <optional>
#include <string>

#include "indet/jacobi.hpp"
#include "indet/zeros.hpp"

namespace indet {

inline constexpr cplx kBasepoint{0.0, 1.0};
inline constexpr cplx kBasepointAlt{1.0, 2.0};
inline constexpr double kMembershipTol = 1e-7;

struct Residues {
  cplx z0;
  cplx alpha;  ///< coefficient along p_{z0}
  cplx beta;   ///< coefficient along p_{conj z0}
  double norm_input = 0.0;
  std::size_t N = 0;
};

/// Throws DomainError unless Im z0 > 0.
Residues residues(const JacobiCoefficients& src, const SeqVector& v, cplx z0,
                  const TruncationPolicy& pol);

/// (p_0(lambda), ..., p_{N+1}(lambda)) tagged truncated, N = pol.working_n().
SeqVector truncated_p(const JacobiCoefficients& src, cplx lambda, const TruncationPolicy& pol);
SeqVector truncated_q(const JacobiCoefficients& src, cplx lambda, const TruncationPolicy& pol);

/// q_0 + t p_0 (p_0 for t = infinity) as vectors, i.e. the sequences at 0.
SeqVector extension_generator(const JacobiCoefficients& src, const ExtensionParam& t,
                              const TruncationPolicy& pol);

struct SRCoefficients {
  cplx s_plus;
  cplx s_minus;
  cplx r_plus;
  cplx r_minus;
};

/// Residues of p_lambda and q_lambda from the Nevanlinna functions:
/// s+ = D(lambda, conj z0) / (2i Im z0 ||p_{z0}||^2), s- = D(lambda, z0) / (-2i ...),
/// r+- likewise with C.
SRCoefficients s_r_coefficients(const JacobiCoefficients& src, cplx lambda, cplx z0,
                                const TruncationPolicy& pol);

struct MembershipVerdict {
  bool in_domain = false;
  double residual = 0.0;      ///< at the first basepoint
  double residual_alt = 0.0;  ///< at the second basepoint
  double tol = kMembershipTol;
  std::string domain_tag;     ///< "D(T)" or "D(T_t), t=..."
  std::size_t N = 0;
  bool degenerate = false;    ///< input is the zero vector
};

/// max(|alpha|, |beta|) / max(1, ||v||) < tol at z0 and at z0_alt. Throws
/// InconclusiveError when the two basepoints disagree.
MembershipVerdict membership_DT(const JacobiCoefficients& src, const SeqVector& v,
                                const TruncationPolicy& pol, double tol = kMembershipTol,
                                cplx z0 = kBasepoint, cplx z0_alt = kBasepointAlt);

/// The residue pair of v is parallel to that of the generator q_0 + t p_0:
/// |alpha beta_g - beta alpha_g| / (max(1, ||v||) |(alpha_g, beta_g)|) < tol.
MembershipVerdict membership_DTt(const JacobiCoefficients& src, const SeqVector& v,
                                 const ExtensionParam& t, const TruncationPolicy& pol,
                                 double tol = kMembershipTol, cplx z0 = kBasepoint,
                                 cplx z0_alt = kBasepointAlt);

enum class PairCase { pp, qq, pq };

/// pp: B(u,v) when D(u,v) = 0; qq: -C(u,v) when A(u,v) = 0; pq: -D(u,v) when
/// B(u,v) = 0. Absent otherwise, and always absent for u = v.
std::optional<cplx> pair_coefficient(const JacobiCoefficients& src, cplx u, cplx v,
                                     PairCase which, const TruncationPolicy& pol,
                                     double tol = 1e-8);

/// p_u + coeff p_v (pp), q_u + coeff q_v (qq) or p_u + coeff q_v (pq).
SeqVector pair_vector(const JacobiCoefficients& src, cplx u, cplx v, cplx coeff, PairCase which,
                      const TruncationPolicy& pol);

struct ResolventCombination {
  cplx w;                         ///< Stieltjes transform of mu_t at lambda
  MembershipVerdict verdict;      ///< w p_lambda + q_lambda in D(T_t)
  MembershipVerdict in_DT;        ///< the same vector tested against D(T)
  cplx c_coeff;                   ///< -1/(B + tD), or -1/D at infinity
  MembershipVerdict remainder;    ///< (w p + q) - c g_t tested against D(T)
};

/// Throws DomainError when lambda lies on supp(mu_t).
ResolventCombination resolvent_combination(const JacobiCoefficients& src, const ExtensionParam& t,
                                           cplx lambda, const DiscreteMeasure& measure,
                                           const TruncationPolicy& pol,
                                           double tol = kMembershipTol,
                                           double refine_tol = 1e-12);

}  // namespace indet
