#pragma once

// F_c, G_c, the reproducing kernel, the difference-quotient coefficients
// a_{n,k}(z0) and the operator Xi_{z0}.

#include <cstdint>
#include <string>
#include <vector>

#include "indet/jacobi.hpp"

namespace indet {

/// F_c(z) = sum c_n p_n(z) over the stored entries.
cplx F_eval(const JacobiCoefficients& src, const SeqVector& c, cplx z,
            const TruncationPolicy& pol = {});
/// G_c(z) = sum c_n q_n(z).
cplx G_eval(const JacobiCoefficients& src, const SeqVector& c, cplx z,
            const TruncationPolicy& pol = {});

/// K(u,v) = sum_{k<=N} p_k(u) p_k(v), N from the stop rule of nev(u, v) (or
/// pol.fixed_n), so that D(u,v) = (u - v) K(u,v) at the same N. Throws
/// ConvergenceError when the series do not settle.
cplx kernel(const JacobiCoefficients& src, cplx u, cplx v, const TruncationPolicy& pol);

struct CoeffMatrix {
  cplx z0;
  std::size_t N = 0;
  std::vector<std::vector<cplx>> rows;  ///< rows[n][k] = a_{n,k}(z0), k < n
  double expansion_residual = 0.0;      ///< checked at a seeded random z

  cplx at(std::size_t n, std::size_t k) const { return rows.at(n).at(k); }
};

/// a_{n,k}(z0) = q_n(z0) p_k(z0) - p_n(z0) q_k(z0) for 0 <= k < n <= N. The
/// expansion (p_n(z) - p_n(z0))/(z - z0) = sum_k a_{n,k} p_k(z) is verified
/// at one random z; throws Error when it is off by more than 1e-9.
CoeffMatrix coeff_matrix(const JacobiCoefficients& src, cplx z0, std::size_t N,
                         const TruncationPolicy& pol = {}, std::uint64_t seed = 1);

/// xi_k(c, z0) = sum_{n>k} c_n a_{n,k}(z0) for k = 0..M-1, via suffix sums.
SeqVector xi_apply(const JacobiCoefficients& src, const SeqVector& c, cplx z0,
                   const TruncationPolicy& pol = {});

/// ||(J - z0) xi(c) + F_c(z0) e_0 - c|| / max(1, ||c||).
double resolvent_residual(const JacobiCoefficients& src, const SeqVector& c, cplx z0,
                          const TruncationPolicy& pol = {});

/// |(F_c(z) - F_c(z0))/(z - z0) - F_xi(z)|. At z = z0 the quotient is
/// replaced by a centred difference with step 1e-5 (1 + |z0|).
double diff_quotient_residual(const JacobiCoefficients& src, const SeqVector& c, cplx z0, cplx z,
                              const TruncationPolicy& pol = {});

struct BoundCheck {
  std::string name;
  double lhs = 0.0;     ///< at the worst sample
  double rhs = 0.0;
  double max_ratio = 0.0;  ///< max lhs/rhs over samples
  std::size_t samples = 0;
  bool ok = false;      ///< lhs <= rhs (1 + 1e-10) everywhere
};

struct BoundReport {
  cplx z0;
  std::size_t N = 0;
  std::vector<BoundCheck> checks;
  bool all_ok() const;
};

/// Coefficient bound, row-sum bound, difference-quotient bound (at
/// z0 + 0.1 and seeded z) and the Xi norm bound for `unit_vectors` random
/// unit c, all at N = pol.working_n().
BoundReport bound_suite(const JacobiCoefficients& src, cplx z0, const TruncationPolicy& pol,
                        std::uint64_t seed = 1, int unit_vectors = 100);

}  // namespace indet
