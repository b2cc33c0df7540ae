#pragma once

// Nevanlinna functions A, B, C, D of one and two variables, their partial
// (polynomial) versions, transfer matrices and the identities tying them
// together.
//
// Every value is computed at a finite truncation index N. At fixed N the
// partial functions satisfy the determinant identity, the transfer cocycle
// and the three-point formulas exactly, so multi-point operations evaluate
// all of their pairs at one shared N.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "indet/common.hpp"
#include "indet/jacobi.hpp"

namespace indet {

struct NevQuad {
  cplx u;
  cplx v;
  cplx A;
  cplx B;
  cplx C;
  cplx D;
  std::size_t N = 0;
  double cross_err = 0.0;  ///< max |series - Casorati| over the four functions
  bool converged = false;

  /// |A D - B C - 1|
  double det_residual() const;
};

/// A_n..D_n by the partial sums; cross_err compares against the Casorati
/// determinant forms a_n |x_{n+1}(u) y_{n+1}(v); x_n(u) y_n(v)|.
NevQuad nev_partial(const JacobiCoefficients& src, cplx u, cplx v, std::size_t n,
                    Precision precision = Precision::standard);

/// Per-series stop index: each of the four series stops at the first n where
/// safety * (last two increments) < tail_tol * (1 + |partial value|); the
/// quadruple uses the largest of the four.
std::size_t nev_stop_index(const JacobiCoefficients& src, cplx u, cplx v,
                           const TruncationPolicy& pol, bool* converged = nullptr);

/// Two-variable Nevanlinna functions at the stop-rule truncation (or at
/// pol.fixed_n when set).
NevQuad nev(const JacobiCoefficients& src, cplx u, cplx v, const TruncationPolicy& pol);

/// One-variable functions A(u) = A(u,0), etc. Result has v = 0.
NevQuad nev_one(const JacobiCoefficients& src, cplx u, const TruncationPolicy& pol);

/// Two-variable functions rebuilt from one-variable values at the same N as
/// nev(u, v):
///   A(u,v) = A(u)C(v) - A(v)C(u)     B(u,v) = B(u)C(v) - A(v)D(u)
///   C(u,v) = A(u)D(v) - B(v)C(u)     D(u,v) = B(u)D(v) - B(v)D(u)
NevQuad reconstruct_two_var(const JacobiCoefficients& src, cplx u, cplx v,
                            const TruncationPolicy& pol);

/// Max absolute residual of the four three-point formulas, with all pairs
/// evaluated at one shared truncation.
double three_point_residual(const JacobiCoefficients& src, cplx u, cplx v, cplx w,
                            const TruncationPolicy& pol);

/// 2x2 complex matrix, row-major.
struct Mat2 {
  std::array<cplx, 4> m{};

  cplx operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }
  cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
  Mat2 inverse() const;
  double max_abs() const;
  static Mat2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }
};
Mat2 operator*(const Mat2& x, const Mat2& y);
Mat2 operator-(const Mat2& x, const Mat2& y);

/// h_n(u,v) = [[C_n, A_n], [-D_n, -B_n]].
struct TransferMatrix {
  Mat2 entries;
  cplx u;
  cplx v;
  std::size_t n = 0;
};

TransferMatrix transfer(const JacobiCoefficients& src, cplx u, cplx v, std::size_t n,
                        Precision precision = Precision::standard);

/// Relative residual of P_n(u) h_n(u,v) = P_n(v), where
/// P_n(z) = [[p_n(z), q_n(z)], [p_{n+1}(z), q_{n+1}(z)]].
double transfer_residual(const JacobiCoefficients& src, cplx u, cplx v, std::size_t n);

/// Point of the extended complex plane C u {infinity}.
class ExtComplex {
 public:
  ExtComplex(cplx z) : value_(z) {}  // NOLINT(google-explicit-constructor)
  static ExtComplex infinity() { return ExtComplex(); }

  bool is_infinite() const { return !value_.has_value(); }
  /// Throws DomainError at infinity.
  cplx value() const;

 private:
  ExtComplex() = default;
  std::optional<cplx> value_;
};

/// z -> (C z + A) / (-D z - B) with the quadruple's values.
ExtComplex mobius_apply(const NevQuad& quad, ExtComplex z);

ExtComplex mobius(const JacobiCoefficients& src, cplx u, cplx v, ExtComplex z,
                  const TruncationPolicy& pol);

/// Max residual of the relations between the problem and its once-truncated
/// problem (marked ~):
///   A(u) = a_0^-2 D~(u),  C(u) = -b_0 a_0^-2 D~(u) - B~(u),
///   D~(u,v) = a_0^2 A(u,v),  B~(u,v) = (v - b_0) A(u,v) - C(u,v).
/// The truncated problem is evaluated at index N-1 against index N.
double tilde_relations_residual(const JacobiCoefficients& src, cplx u, cplx v,
                                const TruncationPolicy& pol);

/// |x y| = x1 y2 - x2 y1 for columns x, y.
inline cplx det2(const std::array<cplx, 2>& x, const std::array<cplx, 2>& y) {
  return x[0] * y[1] - x[1] * y[0];
}

/// Functions u -> A_N(u,v), ..., D_N(u,v) with v and N fixed. Caches the
/// sequences at v so repeated evaluation costs one recurrence in u.
class NevanlinnaSlice {
 public:
  NevanlinnaSlice(const JacobiCoefficients& src, cplx v, std::size_t N,
                  Precision precision = Precision::standard);

  NevQuad at(cplx u) const;

  /// Same values, always computed in extended precision.
  NevQuad at_extended(cplx u) const;

  /// sum_{k<=N} p_k(u) p_k(v), i.e. the kernel K_N(u,v) = D_N(u,v)/(u-v).
  cplx kernel_pp(cplx u) const;
  /// sum_{k<=N} q_k(u) q_k(v) = A_N(u,v)/(u-v).
  cplx kernel_qq(cplx u) const;

  cplx v() const { return v_; }
  std::size_t N() const { return N_; }

 private:
  JacobiCoefficients src_;
  cplx v_;
  std::size_t N_;
  Precision precision_;
  std::vector<Coeff> tab_;
  std::vector<cplx> pv_;
  std::vector<cplx> qv_;
};

}  // namespace indet
