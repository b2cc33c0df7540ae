#pragma once

// Real zeros of B + tD and of u -> F(u,v), argument-principle counts,
// N-extremal measures and their Stieltjes transforms.
//
// All spectral quantities here live at the working truncation
// pol.working_n(): supports are zeros of B_N + t D_N and masses are
// 1 / sum_{k<=N} p_k(x)^2, which together form an exact quadrature for
// polynomials of degree <= 2N.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "indet/common.hpp"
#include "indet/jacobi.hpp"
#include "indet/nevanlinna.hpp"

namespace indet {

/// t in R u {infinity}.
class ExtensionParam {
 public:
  static ExtensionParam finite(double t);
  static ExtensionParam infinity() { return ExtensionParam(); }
  /// Accepts a decimal real or "inf".
  static ExtensionParam parse(const std::string& text);

  bool is_infinite() const { return !t_.has_value(); }
  /// Throws DomainError at infinity.
  double value() const;
  std::string str() const;

  bool operator==(const ExtensionParam& o) const { return t_ == o.t_; }

 private:
  ExtensionParam() = default;
  std::optional<double> t_;
};

struct RootScanConfig {
  double lo = -10.0;
  double hi = 10.0;
  double grid_step = 0.25;   ///< initial sampling step
  double refine_tol = 1e-12; ///< bracket width target
  double zero_tol = 1e-8;    ///< |f(x*)| relative to |f| at the bracket ends

  /// Throws Error unless lo < hi and all tolerances are positive.
  void validate() const;
};

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<cplx(cplx)>;

struct ZeroScan {
  std::vector<double> zeros;
  double grid_step = 0.0;     ///< step of the final scan
  bool extended = false;      ///< final scan ran in extended precision
  bool suspect_missed = false;
  std::optional<int> strip_count; ///< argument-principle count around the window
};

/// Sign-change scan with bracketing refinement. When `fc` (the complex
/// extension of f) is given, the number of zeros is cross-checked by an
/// argument-principle count over a thin strip around the window; on a
/// mismatch the step is halved, then `f_ext` (extended precision) is tried,
/// and finally `suspect_missed` is set.
ZeroScan real_zeros(const RealFn& f, const RootScanConfig& cfg, const ComplexFn* fc = nullptr,
                    const RealFn* f_ext = nullptr);

struct Rect {
  double re_lo;
  double re_hi;
  double im_lo;
  double im_hi;
};

/// Winding number of F around the rectangle boundary. Segments are refined
/// until every phase increment is below pi/2. Throws DomainError "perturb
/// rectangle" when a zero sits on (or numerically at) the contour.
int count_zeros_rect(const ComplexFn& F, const Rect& rect, int samples_per_side = 64);

/// x -> B_N(x) + t D_N(x) (or D_N(x) at infinity) at N = pol.working_n().
ComplexFn extremal_function(const JacobiCoefficients& src, const ExtensionParam& t,
                            const TruncationPolicy& pol);

ZeroScan nextremal_scan(const JacobiCoefficients& src, const ExtensionParam& t,
                        const RootScanConfig& cfg, const TruncationPolicy& pol);
std::vector<double> nextremal_support(const JacobiCoefficients& src, const ExtensionParam& t,
                                      const RootScanConfig& cfg, const TruncationPolicy& pol);

/// -B(x0)/D(x0), or infinity when |D(x0)| is below the degeneracy scale
/// 1e-9 (|B(x0)| + |D'(x0)| refine_tol).
ExtensionParam t_for_point(const JacobiCoefficients& src, double x0, const TruncationPolicy& pol,
                           double refine_tol = 1e-12);

/// 1 / sum_{k<=N} p_k(x)^2 at N = pol.working_n(). Throws ConvergenceError
/// when the p/q series at x do not settle before the cap.
double mass_at(const JacobiCoefficients& src, double x, const TruncationPolicy& pol);

struct DiscreteMeasure {
  ExtensionParam t = ExtensionParam::infinity();
  std::vector<double> points;
  std::vector<double> masses;
  double lo = 0.0;
  double hi = 0.0;
  double captured_mass = 0.0;
  std::vector<double> moment_residuals; ///< |sum m_i x_i^n - s_n|, n = 0..n_check
  std::size_t N = 0;
  double grid_step = 0.0;
  bool suspect_missed = false;
  std::vector<double> radii; ///< window half-widths tried by the doubling rule
};

DiscreteMeasure build_measure(const JacobiCoefficients& src, const ExtensionParam& t,
                              const RootScanConfig& cfg, std::size_t n_check,
                              const TruncationPolicy& pol);

/// Window doubling: [-R, R] from R = r0, doubled until captured mass grows
/// by < 1e-8 and every moment n <= n_check moves by < 1e-7 (1 + |s_n|).
/// A doubling that adds no support point never counts as settled.
/// Throws ConvergenceError when r_max is exceeded.
DiscreteMeasure build_measure_auto(const JacobiCoefficients& src, const ExtensionParam& t,
                                   std::size_t n_check, const TruncationPolicy& pol,
                                   const RootScanConfig& base = {}, double r0 = 5.0,
                                   double r_max = 5000.0);

struct StieltjesValues {
  cplx w_param;
  cplx w_twovar;
  cplx w_sum;
  double spread = 0.0;        ///< max pairwise discrepancy of the three
  double twovar_spread = 0.0; ///< max discrepancy among the per-point values
  std::vector<cplx> per_point;
};

/// Three evaluations of the Stieltjes transform of mu_t at lambda. Throws
/// DomainError when lambda is within refine_tol of a support point.
StieltjesValues stieltjes(const JacobiCoefficients& src, const ExtensionParam& t, cplx lambda,
                          const DiscreteMeasure& measure, const TruncationPolicy& pol,
                          double refine_tol = 1e-12);

enum class ZeroCase { D_case, A_case };

struct AdjacentZero {
  double u;
  double value; ///< B(u,v) for the D-case, C(u,v) for the A-case
  bool sign_ok;
};

/// Largest zero u < v of D(.,v) (or A(.,v)) in [cfg.lo, v). Throws
/// DomainError when there is none.
AdjacentZero adjacent_zero_sign(const JacobiCoefficients& src, double v, const RootScanConfig& cfg,
                                ZeroCase which, const TruncationPolicy& pol);

/// `x,mass` CSV with 17 significant digits, sorted by x.
void write_measure_csv(std::ostream& out, const DiscreteMeasure& m);
/// JSON metadata: window, t, N, captured mass, moment residuals.
void write_measure_sidecar(std::ostream& out, const DiscreteMeasure& m);

}  // namespace indet
