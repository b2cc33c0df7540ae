#include "indet/zeros.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "json.hpp"

namespace indet {

ExtensionParam ExtensionParam::finite(double t) {
  if (!std::isfinite(t)) throw DomainError("extension parameter must be a finite real or inf");
  ExtensionParam p;
  p.t_ = t;
  return p;
}

ExtensionParam ExtensionParam::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "oo") return infinity();
  double t = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, t);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("invalid extension parameter '" + text + "' (expected a real or inf)",
                     static_cast<std::size_t>(ptr - text.data()));
  }
  return finite(t);
}

double ExtensionParam::value() const {
  if (!t_) throw DomainError("extension parameter is infinite");
  return *t_;
}

std::string ExtensionParam::str() const {
  if (!t_) return "inf";
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << *t_;
  return s.str();
}

void RootScanConfig::validate() const {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error("root scan: window needs lo < hi");
  }
  if (!(grid_step > 0.0) || !(refine_tol > 0.0) || !(zero_tol > 0.0)) {
    throw Error("root scan: grid_step, refine_tol and zero_tol must be > 0");
  }
}

namespace {

struct ScanPass {
  std::vector<double> zeros;
  bool rejected = false;  // a bracket whose midpoint failed the residual test
};

ScanPass scan_once(const RealFn& f, double lo, double hi, double step, const RootScanConfig& cfg) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  const double h = (hi - lo) / static_cast<double>(n);
  std::vector<double> xs(n + 1), fs(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    xs[i] = i == n ? hi : lo + static_cast<double>(i) * h;
    fs[i] = f(xs[i]);
    if (!std::isfinite(fs[i])) throw OverflowError("evaluation overflow; reduce |z| or use higher precision");
  }
  ScanPass out;
  for (std::size_t i = 0; i <= n; ++i) {
    double xl = xs[i], fl = fs[i];
    if (fs[i] == 0.0) {
      out.zeros.push_back(xs[i]);
      if (i == n) continue;
      // Another zero may share the cell; restart the bracket just past this one.
      xl = xs[i] + h / 64.0;
      fl = f(xl);
      if (fl == 0.0) continue;
    }
    if (i == n || fs[i + 1] == 0.0 || std::signbit(fl) == std::signbit(fs[i + 1])) continue;
    const double width_floor = 4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::abs(xl), std::abs(xs[i + 1]));
    const double width = std::max(cfg.refine_tol, width_floor);
    auto stop = [width](double a, double b) { return std::abs(b - a) <= width; };
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, xl, xs[i + 1], fl, fs[i + 1],
                                                          stop, iters);
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    const double scale = std::max({1.0, std::abs(fl), std::abs(fs[i + 1])});
    if (std::abs(fx) < cfg.zero_tol * scale) {
      out.zeros.push_back(x);
    } else {
      out.rejected = true;
    }
  }
  std::sort(out.zeros.begin(), out.zeros.end());
  out.zeros.erase(std::unique(out.zeros.begin(), out.zeros.end(),
                              [&](double a, double b) { return b - a <= cfg.refine_tol; }),
                  out.zeros.end());
  return out;
}

double min_gap(const std::vector<double>& z) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < z.size(); ++i) g = std::min(g, z[i] - z[i - 1]);
  return g;
}

// Argument-principle count over a thin strip around [lo, hi]; the vertical
// edges are nudged inward when they pass too close to a zero. Returns the
// count and the number of scanned zeros inside the same strip.
std::optional<std::pair<int, int>> strip_check(const ComplexFn& fc, const std::vector<double>& zeros,
                                               double lo, double hi, double step) {
  const double height = std::min(0.5, 0.25 * (hi - lo));
  for (double nudge : {0.0, 0.31, 0.17, 0.43}) {
    const double a = lo + nudge * step, b = hi - nudge * step;
    try {
      const int count = count_zeros_rect(fc, {a, b, -height, height});
      const auto inside = std::count_if(zeros.begin(), zeros.end(),
                                        [&](double x) { return x > a && x < b; });
      return std::make_pair(count, static_cast<int>(inside));
    } catch (const DomainError&) {
    }
  }
  return std::nullopt;
}

}  // namespace

ZeroScan real_zeros(const RealFn& f, const RootScanConfig& cfg, const ComplexFn* fc,
                    const RealFn* f_ext) {
  cfg.validate();
  ZeroScan out;
  double step = cfg.grid_step;
  ScanPass pass = scan_once(f, cfg.lo, cfg.hi, step, cfg);
  // Bootstrap: refine to half the smallest observed gap.
  if (pass.zeros.size() >= 2 && min_gap(pass.zeros) / 2.0 < step) {
    step = min_gap(pass.zeros) / 2.0;
    pass = scan_once(f, cfg.lo, cfg.hi, step, cfg);
  }
  out.zeros = pass.zeros;
  out.grid_step = step;
  out.suspect_missed = pass.rejected;
  if (!fc) return out;

  auto agrees = [&](const ScanPass& p) {
    const auto chk = strip_check(*fc, p.zeros, cfg.lo, cfg.hi, step);
    if (chk) out.strip_count = chk->first;
    return chk && chk->first == chk->second && !p.rejected;
  };
  if (agrees(pass)) return out;

  step /= 2.0;
  pass = scan_once(f, cfg.lo, cfg.hi, step, cfg);
  out.zeros = pass.zeros;
  out.grid_step = step;
  if (agrees(pass)) {
    out.suspect_missed = false;
    return out;
  }
  if (f_ext) {
    pass = scan_once(*f_ext, cfg.lo, cfg.hi, step, cfg);
    out.zeros = pass.zeros;
    out.extended = true;
    if (agrees(pass)) {
      out.suspect_missed = false;
      return out;
    }
  }
  out.suspect_missed = true;
  return out;
}

namespace {

double phase_step(cplx fa, cplx fb) { return std::arg(fb / fa); }

struct Walker {
  const ComplexFn& F;
  double floor_len;
  cplx eval(cplx z) const {
    const cplx v = F(z);
    if (!std::isfinite(std::abs(v))) {
      throw OverflowError("evaluation overflow; reduce |z| or use higher precision");
    }
    if (v == cplx{}) throw DomainError("zero on contour; perturb rectangle");
    return v;
  }
  // Accumulated phase change from a to b.
  double walk(cplx a, cplx fa, cplx b, cplx fb, int depth) const {
    const cplx m = 0.5 * (a + b);
    const cplx fm = eval(m);
    const double d_ab = phase_step(fa, fb);
    const double d_am = phase_step(fa, fm);
    const double d_mb = phase_step(fm, fb);
    const bool settled = std::abs(d_am) < M_PI / 2 && std::abs(d_mb) < M_PI / 2 &&
                         std::abs(d_am + d_mb - d_ab) < 1e-6;
    if (settled) return d_am + d_mb;
    if (depth > 60 || std::abs(b - a) < floor_len) {
      throw DomainError("zero on contour; perturb rectangle");
    }
    return walk(a, fa, m, fm, depth + 1) + walk(m, fm, b, fb, depth + 1);
  }
};

}  // namespace

int count_zeros_rect(const ComplexFn& F, const Rect& r, int samples_per_side) {
  if (!(r.re_lo < r.re_hi) || !(r.im_lo < r.im_hi)) throw Error("degenerate rectangle");
  if (samples_per_side < 1) throw Error("samples_per_side must be >= 1");
  const double size = std::max({std::abs(r.re_lo), std::abs(r.re_hi), std::abs(r.im_lo),
                                std::abs(r.im_hi), r.re_hi - r.re_lo, r.im_hi - r.im_lo});
  const Walker w{F, 1e-11 * size};
  const std::array<cplx, 5> corner{cplx(r.re_lo, r.im_lo), cplx(r.re_hi, r.im_lo),
                                   cplx(r.re_hi, r.im_hi), cplx(r.re_lo, r.im_hi),
                                   cplx(r.re_lo, r.im_lo)};
  double total = 0.0;
  for (int side = 0; side < 4; ++side) {
    const cplx a = corner[side], b = corner[side + 1];
    cplx prev = a;
    cplx fprev = w.eval(a);
    for (int k = 1; k <= samples_per_side; ++k) {
      const cplx z = k == samples_per_side ? b : a + (b - a) * (double(k) / samples_per_side);
      const cplx fz = w.eval(z);
      total += w.walk(prev, fprev, z, fz, 0);
      prev = z;
      fprev = fz;
    }
  }
  const double turns = total / (2.0 * M_PI);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-3) throw DomainError("zero on contour; perturb rectangle");
  return static_cast<int>(rounded);
}

namespace {

cplx combine(const NevQuad& q, const ExtensionParam& t) {
  return t.is_infinite() ? q.D : q.B + t.value() * q.D;
}

std::shared_ptr<const NevanlinnaSlice> slice_at_zero(const JacobiCoefficients& src,
                                                     const TruncationPolicy& pol) {
  pol.validate();
  return std::make_shared<const NevanlinnaSlice>(src, 0.0, pol.working_n(), pol.precision);
}

}  // namespace

ComplexFn extremal_function(const JacobiCoefficients& src, const ExtensionParam& t,
                            const TruncationPolicy& pol) {
  auto s = slice_at_zero(src, pol);
  return [s, t](cplx z) { return combine(s->at(z), t); };
}

ZeroScan nextremal_scan(const JacobiCoefficients& src, const ExtensionParam& t,
                        const RootScanConfig& cfg, const TruncationPolicy& pol) {
  auto s = slice_at_zero(src, pol);
  const ComplexFn fc = [s, t](cplx z) { return combine(s->at(z), t); };
  const RealFn f = [s, t](double x) { return std::real(combine(s->at(x), t)); };
  const RealFn fx = [s, t](double x) { return std::real(combine(s->at_extended(x), t)); };
  return real_zeros(f, cfg, &fc, &fx);
}

std::vector<double> nextremal_support(const JacobiCoefficients& src, const ExtensionParam& t,
                                      const RootScanConfig& cfg, const TruncationPolicy& pol) {
  return nextremal_scan(src, t, cfg, pol).zeros;
}

ExtensionParam t_for_point(const JacobiCoefficients& src, double x0, const TruncationPolicy& pol,
                           double refine_tol) {
  pol.validate();
  const std::size_t N = pol.working_n();
  const NevQuad q = nev_partial(src, x0, 0.0, N, pol.precision);
  const double h = 1e-6 * (1.0 + std::abs(x0));
  const double dD = std::real(nev_partial(src, x0 + h, 0.0, N, pol.precision).D -
                              nev_partial(src, x0 - h, 0.0, N, pol.precision).D) /
                    (2.0 * h);
  const double degeneracy = 1e-9 * (std::abs(q.B) + std::abs(dD) * refine_tol);
  if (std::abs(q.D) <= degeneracy) return ExtensionParam::infinity();
  return ExtensionParam::finite(-std::real(q.B) / std::real(q.D));
}

double mass_at(const JacobiCoefficients& src, double x, const TruncationPolicy& pol) {
  pol.validate();
  const std::size_t N = pol.working_n();
  TruncationPolicy probe = pol;
  probe.fixed_n.reset();
  probe.n_max = std::max(pol.n_max, N);
  if (!eval_pq(src, x, probe).converged) {
    throw ConvergenceError("p/q series at x did not settle before the truncation cap");
  }
  return 1.0 / eval_pq_fixed(src, x, N, pol).cum_p2;
}

DiscreteMeasure build_measure(const JacobiCoefficients& src, const ExtensionParam& t,
                              const RootScanConfig& cfg, std::size_t n_check,
                              const TruncationPolicy& pol) {
  const ZeroScan scan = nextremal_scan(src, t, cfg, pol);
  DiscreteMeasure m;
  m.t = t;
  m.lo = cfg.lo;
  m.hi = cfg.hi;
  m.N = pol.working_n();
  m.grid_step = scan.grid_step;
  m.suspect_missed = scan.suspect_missed;
  m.points = scan.zeros;
  for (const double x : m.points) m.masses.push_back(mass_at(src, x, pol));
  std::vector<long double> sums(n_check + 1, 0.0L);
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    long double xp = 1.0L;
    for (std::size_t n = 0; n <= n_check; ++n) {
      sums[n] += static_cast<long double>(m.masses[i]) * xp;
      xp *= m.points[i];
    }
  }
  m.captured_mass = static_cast<double>(sums[0]);
  for (std::size_t n = 0; n <= n_check; ++n) {
    m.moment_residuals.push_back(std::abs(static_cast<double>(sums[n]) - moment(src, n)));
  }
  return m;
}

DiscreteMeasure build_measure_auto(const JacobiCoefficients& src, const ExtensionParam& t,
                                   std::size_t n_check, const TruncationPolicy& pol,
                                   const RootScanConfig& base, double r0, double r_max) {
  std::vector<double> radii;
  auto at_radius = [&](double R) {
    RootScanConfig cfg = base;
    cfg.lo = -R;
    cfg.hi = R;
    radii.push_back(R);
    return build_measure(src, t, cfg, n_check, pol);
  };
  double R = r0;
  DiscreteMeasure prev = at_radius(R);
  while (2.0 * R <= r_max) {
    R *= 2.0;
    DiscreteMeasure cur = at_radius(R);
    // An annulus without new points says nothing about the tail.
    bool settled = cur.points.size() > prev.points.size() &&
                   std::abs(cur.captured_mass - prev.captured_mass) < 1e-8;
    for (std::size_t n = 0; n <= n_check && settled; ++n) {
      const double s = moment(src, n);
      auto sum = [&](const DiscreteMeasure& m) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < m.points.size(); ++i) {
          acc += static_cast<long double>(m.masses[i]) * std::pow(static_cast<long double>(m.points[i]), n);
        }
        return static_cast<double>(acc);
      };
      settled = std::abs(sum(cur) - sum(prev)) < 1e-7 * (1.0 + std::abs(s));
    }
    if (settled) {
      cur.radii = radii;
      return cur;
    }
    prev = std::move(cur);
  }
  throw ConvergenceError("window doubling did not settle below the radius cap");
}

StieltjesValues stieltjes(const JacobiCoefficients& src, const ExtensionParam& t, cplx lambda,
                          const DiscreteMeasure& measure, const TruncationPolicy& pol,
                          double refine_tol) {
  pol.validate();
  if (measure.points.empty()) throw DomainError("measure has no support points in its window");
  for (const double x : measure.points) {
    if (std::abs(lambda - x) <= refine_tol) throw DomainError("lambda lies on the support");
  }
  const std::size_t N = pol.working_n();
  StieltjesValues out;
  const NevQuad one = nev_partial(src, lambda, 0.0, N, pol.precision);
  out.w_param = t.is_infinite() ? -one.C / one.D
                                : -(one.A + t.value() * one.C) / (one.B + t.value() * one.D);

  std::vector<double> near = measure.points;
  std::sort(near.begin(), near.end(), [&](double a, double b) {
    return std::abs(lambda - a) < std::abs(lambda - b);
  });
  near.resize(std::min<std::size_t>(5, near.size()));
  cplx acc = 0.0;
  for (const double x : near) {
    const NevQuad q = nev_partial(src, lambda, x, N, pol.precision);
    out.per_point.push_back(-q.C / q.D);
    acc += out.per_point.back();
  }
  out.w_twovar = acc / static_cast<double>(near.size());
  for (const cplx a : out.per_point) {
    for (const cplx b : out.per_point) out.twovar_spread = std::max(out.twovar_spread, std::abs(a - b));
  }

  for (std::size_t i = 0; i < measure.points.size(); ++i) {
    out.w_sum += measure.masses[i] / (measure.points[i] - lambda);
  }
  out.spread = std::max({std::abs(out.w_param - out.w_twovar), std::abs(out.w_param - out.w_sum),
                         std::abs(out.w_twovar - out.w_sum)});
  return out;
}

AdjacentZero adjacent_zero_sign(const JacobiCoefficients& src, double v, const RootScanConfig& cfg,
                                ZeroCase which, const TruncationPolicy& pol) {
  pol.validate();
  if (!(cfg.lo < v)) throw DomainError("window must extend below v");
  const std::size_t N = pol.working_n();
  auto s = std::make_shared<const NevanlinnaSlice>(src, v, N, pol.precision);
  const bool dcase = which == ZeroCase::D_case;
  // Zeros of D(.,v) other than v are the zeros of the kernel sum; same for A.
  const ComplexFn fc = [s, dcase](cplx u) { return dcase ? s->kernel_pp(u) : s->kernel_qq(u); };
  const RealFn f = [&fc](double u) { return std::real(fc(u)); };
  RootScanConfig c = cfg;
  c.hi = v;
  const ZeroScan scan = real_zeros(f, c, &fc);
  if (scan.zeros.empty()) throw DomainError("no zero below v in window");
  AdjacentZero out;
  out.u = scan.zeros.back();
  const NevQuad q = nev_partial(src, out.u, v, N, pol.precision);
  out.value = std::real(dcase ? q.B : q.C);
  out.sign_ok = dcase ? out.value > 0.0 : out.value < 0.0;
  return out;
}

namespace {

std::string g17(double x) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_measure_csv(std::ostream& out, const DiscreteMeasure& m) {
  out << "x,mass\n";
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    out << g17(m.points[i]) << ',' << g17(m.masses[i]) << '\n';
  }
}

void write_measure_sidecar(std::ostream& out, const DiscreteMeasure& m) {
  nlohmann::ordered_json j;
  j["t"] = m.t.str();
  j["window"] = {m.lo, m.hi};
  j["N"] = m.N;
  j["grid_step"] = m.grid_step;
  j["points"] = m.points.size();
  j["captured_mass"] = m.captured_mass;
  j["moment_residuals"] = m.moment_residuals;
  j["radii"] = m.radii;
  j["suspect_missed"] = m.suspect_missed;
  out << j.dump(2) << '\n';
}

}  // namespace indet
