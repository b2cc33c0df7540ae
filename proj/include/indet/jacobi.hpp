#pragma once

// Jacobi coefficients, the p/q recurrence, and the banded Jacobi matrix.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "indet/common.hpp"

namespace indet {

/// One row of the Jacobi matrix: off-diagonal a_n > 0 and diagonal b_n.
struct Coeff {
  double a;
  double b;
};

/// Formula for coefficients beyond an explicit list. Receives the absolute
/// index n.
using TailRule = std::function<Coeff(std::size_t)>;

/// Immutable source of Jacobi coefficients. Copies share the underlying data
/// and are safe to use from several threads.
class JacobiCoefficients {
 public:
  /// a_n = (n+1)^exponent, b_n = 0. Requires exponent > 1.
  static JacobiCoefficients power_law(double exponent);

  /// Explicit rows. Without a tail rule the last row is a hard maximum index.
  static JacobiCoefficients explicit_list(std::vector<Coeff> rows,
                                          std::optional<TailRule> tail = std::nullopt,
                                          std::string description = "explicit");

  /// Reads the plain-text coefficient format: one `a_n b_n` pair per line,
  /// `#` comment lines, blank lines ignored. Throws ParseError carrying the
  /// 1-based line number.
  static JacobiCoefficients parse(std::istream& in, std::string description = "stream");
  static JacobiCoefficients from_file(const std::string& path);

  Coeff coeffs(std::size_t n) const;

  /// Rows 0..last as a table; throws RangeError when the source ends earlier.
  std::vector<Coeff> table(std::size_t last) const;

  /// Source of the matrix with the first row and column removed.
  JacobiCoefficients truncate_once() const;

  /// Largest valid index, or nullopt for unbounded sources.
  std::optional<std::size_t> max_index() const;

  const std::string& description() const { return description_; }
  std::size_t offset() const { return offset_; }

 private:
  struct Data;
  JacobiCoefficients(std::shared_ptr<const Data> data, std::size_t offset,
                     std::string description);

  std::shared_ptr<const Data> data_;
  std::size_t offset_ = 0;
  std::string description_;
};

/// Controls where the p/q series are cut.
struct TruncationPolicy {
  std::size_t n_max = 500;  ///< hard cap on the truncation index
  double tail_tol = 1e-3;   ///< target relative size of the last increment
  double safety = 10.0;     ///< multiplier on the last-increment estimate
  Precision precision = Precision::standard;
  /// When set, stop rules are bypassed and every evaluation uses this index.
  std::optional<std::size_t> fixed_n;

  /// Throws Error unless n_max >= 8, tail_tol > 0, safety >= 1.
  void validate() const;

  /// Truncation shared by all spectral computations (supports, masses,
  /// residues): fixed_n when set, otherwise n_max.
  std::size_t working_n() const { return fixed_n.value_or(n_max); }
};

/// p_0..p_N and q_0..q_N at one point.
struct PolyEval {
  cplx z;
  std::vector<cplx> p;
  std::vector<cplx> q;
  double cum_p2 = 0.0;
  double cum_q2 = 0.0;
  std::size_t N = 0;
  double tail_est = 0.0;  ///< last increment |p_N|^2 + |q_N|^2
  bool converged = false;
};

/// Evaluates the recurrence until the stop rule holds or n_max is reached.
/// Throws OverflowError when values leave the double range.
PolyEval eval_pq(const JacobiCoefficients& src, cplx z, const TruncationPolicy& pol);

/// Evaluates exactly indices 0..N. `converged` reports whether the stop rule
/// of `pol` holds at N.
PolyEval eval_pq_fixed(const JacobiCoefficients& src, cplx z, std::size_t N,
                       const TruncationPolicy& pol = {});

/// Finite complex sequence c_0..c_M.
///
/// A `finite` vector is an element of the finitely supported space: entries
/// beyond M are exactly zero. A `truncated` vector is the leading segment of
/// a square-summable sequence whose later entries are unknown; operations
/// that depend on unseen entries use only the rows determined by c_0..c_M.
struct SeqVector {
  enum class Support { finite, truncated };

  std::vector<cplx> entries;
  Support support = Support::finite;

  SeqVector() = default;
  explicit SeqVector(std::vector<cplx> e, Support s = Support::finite)
      : entries(std::move(e)), support(s) {}

  static SeqVector unit(std::size_t n);

  std::size_t size() const { return entries.size(); }
  /// Highest stored index; 0 for an empty vector.
  std::size_t M() const { return entries.empty() ? 0 : entries.size() - 1; }
  bool truncated() const { return support == Support::truncated; }
  cplx operator[](std::size_t n) const { return n < entries.size() ? entries[n] : cplx{}; }
  double norm() const;
  bool is_zero() const;

  SeqVector conj() const;
  SeqVector& operator+=(const SeqVector& o);
  SeqVector& operator*=(cplx s);
};

SeqVector operator+(SeqVector a, const SeqVector& b);
SeqVector operator-(SeqVector a, const SeqVector& b);
SeqVector operator*(cplx s, SeqVector v);

/// Exact banded product J c; output has indices 0..M+1 and keeps the
/// support tag of the input.
SeqVector apply_jacobi(const JacobiCoefficients& src, const SeqVector& c);

/// s_n = <J^n e_0, e_0>, by n banded applications.
double moment(const JacobiCoefficients& src, std::size_t n);

/// (p_0(z), ..., p_N(z)) as a truncated vector.
SeqVector p_vector(const PolyEval& ev);
/// (q_0(z), ..., q_N(z)) as a truncated vector.
SeqVector q_vector(const PolyEval& ev);

}  // namespace indet
