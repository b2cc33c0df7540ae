#include "indet/acceptance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "indet/debranges.hpp"
#include "indet/domains.hpp"
#include "indet/nevanlinna.hpp"
#include "indet/rng.hpp"
#include "indet/zeros.hpp"

namespace indet {

namespace {

std::string sci(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 3);
  return std::string(buf, r.ptr);
}

const ExtensionParam kTs[] = {ExtensionParam::finite(0.0), ExtensionParam::finite(1.0),
                              ExtensionParam::infinity()};

CheckResult start(int id, std::string name) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

SeqVector random_finite(Rng& rng, std::size_t M) {
  std::vector<cplx> e(M + 1);
  for (auto& c : e) c = rng.in_disk(1.0);
  return SeqVector(e);
}

CheckResult det_identity(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(1, "determinant identity |AD-BC-1| on a 10x10 grid, |u|,|v|<=3");
  r.tol = 1e-9;
  std::vector<cplx> us, vs;
  for (int i = 0; i < 10; ++i) us.push_back(rng.in_disk(3.0));
  for (int i = 0; i < 10; ++i) vs.push_back(rng.in_disk(3.0));
  for (const cplx u : us) {
    for (const cplx v : vs) {
      const NevQuad q = nev(cfg.src, u, v, cfg.pol);
      r.measured = std::max(r.measured, q.det_residual());
      r.N = std::max(r.N, q.N);
    }
  }
  r.pass = r.measured < r.tol;
  return r;
}

CheckResult dual_form(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(2, "series vs Casorati forms of A_n..D_n, n<=200, 20 points (relative)");
  r.tol = 1e-12;
  r.N = 200;
  for (int i = 0; i < 20; ++i) {
    const cplx u = rng.in_disk(3.0), v = rng.in_disk(3.0);
    for (std::size_t n = 0; n <= 200; ++n) {
      const NevQuad q = nev_partial(cfg.src, u, v, n, cfg.pol.precision);
      const double scale =
          std::max({1.0, std::abs(q.A), std::abs(q.B), std::abs(q.C), std::abs(q.D)});
      r.measured = std::max(r.measured, q.cross_err / scale);
    }
  }
  r.pass = r.measured < r.tol;
  return r;
}

CheckResult three_point(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(3, "three-point formulas (50 triples) and transfer cocycle (n<=100)");
  r.tol = 1e-8;
  for (int i = 0; i < 50; ++i) {
    const cplx u = rng.in_disk(2.0), v = rng.in_disk(2.0), w = rng.in_disk(2.0);
    r.measured = std::max(r.measured, three_point_residual(cfg.src, u, v, w, cfg.pol));
  }
  const double cocycle_tol = 1e-10;
  double cocycle = 0.0;
  for (int i = 0; i < 10; ++i) {
    const cplx u = rng.in_disk(2.0), v = rng.in_disk(2.0), w = rng.in_disk(2.0);
    for (std::size_t n = 0; n <= 100; ++n) {
      const Mat2 huv = transfer(cfg.src, u, v, n, cfg.pol.precision).entries;
      const Mat2 huw = transfer(cfg.src, u, w, n, cfg.pol.precision).entries;
      const Mat2 hwv = transfer(cfg.src, w, v, n, cfg.pol.precision).entries;
      cocycle = std::max(cocycle, (huw * hwv - huv).max_abs() / std::max(1.0, huv.max_abs()));
    }
  }
  r.N = cfg.pol.n_max;
  r.detail = "cocycle=" + sci(cocycle) + " cocycle_tol=" + sci(cocycle_tol) + " cocycle_N<=100";
  r.pass = r.measured < r.tol && cocycle < cocycle_tol;
  return r;
}

CheckResult pick(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(4, "Pick property Im(B/D)>0 and Im(A/C)>0 at 100 upper half-plane points");
  r.tol = 0.0;
  double worst = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const cplx z = rng.in_box(-5.0, 5.0, 0.01, 5.0);
    const NevQuad q = nev_one(cfg.src, z, cfg.pol);
    worst = std::min({worst, std::imag(q.B / q.D), std::imag(q.A / q.C)});
    r.N = std::max(r.N, q.N);
  }
  r.measured = worst;
  r.detail = "measured is the smallest imaginary part (must exceed tol)";
  r.pass = worst > r.tol;
  return r;
}

CheckResult measures(const AcceptanceConfig& cfg, Rng&) {
  CheckResult r = start(5, "moment reconstruction n<=6 and captured mass for t in {0,1,inf}");
  r.tol = 1e-6;
  r.N = cfg.pol.working_n();
  std::ostringstream d;
  double cap_err = 0.0;
  for (const ExtensionParam& t : kTs) {
    const DiscreteMeasure m = build_measure_auto(cfg.src, t, 6, cfg.pol);
    for (double x : m.moment_residuals) r.measured = std::max(r.measured, x);
    cap_err = std::max(cap_err, std::abs(m.captured_mass - 1.0));
    d << "t=" << t.str() << ":R=" << m.hi << ",points=" << m.points.size() << " ";
  }
  d << "captured_mass_err=" << sci(cap_err);
  r.detail = d.str();
  r.pass = r.measured < r.tol && cap_err < r.tol;
  return r;
}

CheckResult disjoint_supports(const AcceptanceConfig& cfg, Rng&) {
  CheckResult r = start(6, "support separation t=0 vs t=1 and zero-free off-axis rectangles");
  RootScanConfig scan;
  r.tol = 10.0 * scan.refine_tol;
  r.N = cfg.pol.working_n();
  const DiscreteMeasure m0 = build_measure_auto(cfg.src, kTs[0], 6, cfg.pol);
  const DiscreteMeasure m1 = build_measure_auto(cfg.src, kTs[1], 6, cfg.pol);
  double sep = INFINITY;
  for (double x : m0.points)
    for (double y : m1.points) sep = std::min(sep, std::abs(x - y));
  int counted = 0;
  int rects = 0;
  const double R = std::max(m0.hi, m1.hi);
  for (const ExtensionParam& t : kTs) {
    const ComplexFn f = extremal_function(cfg.src, t, cfg.pol);
    for (double x = -R; x < R; x += R / 4.0) {
      counted += std::abs(count_zeros_rect(f, {x, x + R / 4.0, 0.05, 3.0}));
      counted += std::abs(count_zeros_rect(f, {x, x + R / 4.0, -3.0, -0.05}));
      rects += 2;
    }
  }
  r.measured = sep;
  r.detail = "rectangles=" + std::to_string(rects) + " zeros_counted=" + std::to_string(counted) +
             " (measured is the minimum separation, must exceed tol)";
  r.pass = sep > r.tol && counted == 0;
  return r;
}

CheckResult stieltjes_consistency(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(7, "Stieltjes transform: parametrization vs two-variable form, 10 lambda per t");
  r.tol = 1e-8;
  r.N = cfg.pol.working_n();
  double per_point = 0.0, vs_sum = 0.0;
  for (const ExtensionParam& t : kTs) {
    const DiscreteMeasure m = build_measure_auto(cfg.src, t, 6, cfg.pol);
    for (int i = 0; i < 10; ++i) {
      const cplx lam = rng.in_box(-10.0, 10.0, 0.05, 5.0);
      const StieltjesValues s = stieltjes(cfg.src, t, lam, m, cfg.pol);
      r.measured = std::max(r.measured, std::abs(s.w_param - s.w_twovar));
      per_point = std::max(per_point, s.twovar_spread);
      vs_sum = std::max(vs_sum, std::abs(s.w_param - s.w_sum));
    }
  }
  r.detail = "per_point_spread=" + sci(per_point) + " window_sum_gap=" + sci(vs_sum) + " (reported)";
  r.pass = r.measured < r.tol && per_point < r.tol;
  return r;
}

double worst_residual(const MembershipVerdict& v) { return std::max(v.residual, v.residual_alt); }

CheckResult membership(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(8, "membership: D/A/B-zero pairs in D(T), random pairs not in D(T)");
  r.tol = kMembershipTol;
  r.N = cfg.pol.working_n();
  RootScanConfig below;
  below.lo = -80.0;
  double pos = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double v = rng.uniform(-5.0, 20.0);
    const AdjacentZero dz = adjacent_zero_sign(cfg.src, v, below, ZeroCase::D_case, cfg.pol);
    const auto a = pair_coefficient(cfg.src, dz.u, v, PairCase::pp, cfg.pol);
    const AdjacentZero az = adjacent_zero_sign(cfg.src, v, below, ZeroCase::A_case, cfg.pol);
    const auto b = pair_coefficient(cfg.src, az.u, v, PairCase::qq, cfg.pol);
    const NevanlinnaSlice slice(cfg.src, v, cfg.pol.working_n(), cfg.pol.precision);
    RootScanConfig near;
    near.lo = v - 40.0;
    near.hi = v + 40.0;
    const ComplexFn bf = [&](cplx u) { return slice.at(u).B; };
    const auto bz = real_zeros([&](double u) { return std::real(bf(u)); }, near, &bf).zeros;
    if (!a || !b || bz.empty()) throw Error("pair coefficient absent at a root-found pair");
    const double ub = bz[rng.below(bz.size())];
    const auto g = pair_coefficient(cfg.src, ub, v, PairCase::pq, cfg.pol);
    if (!g) throw Error("pair coefficient absent at a root-found pair");
    pos = std::max({pos,
                    worst_residual(membership_DT(cfg.src, pair_vector(cfg.src, dz.u, v, *a, PairCase::pp, cfg.pol), cfg.pol)),
                    worst_residual(membership_DT(cfg.src, pair_vector(cfg.src, az.u, v, *b, PairCase::qq, cfg.pol), cfg.pol)),
                    worst_residual(membership_DT(cfg.src, pair_vector(cfg.src, ub, v, *g, PairCase::pq, cfg.pol), cfg.pol))});
  }
  const double neg_tol = 1e-3;
  double neg = INFINITY;
  int tested = 0;
  while (tested < 20) {
    const cplx u = rng.in_disk(4.0), v = rng.in_disk(4.0);
    if (std::abs(nev_partial(cfg.src, u, v, cfg.pol.working_n(), cfg.pol.precision).D) <= 0.1) continue;
    ++tested;
    const SeqVector w = pair_vector(cfg.src, u, v, rng.in_disk(3.0), PairCase::pp, cfg.pol);
    const MembershipVerdict m = membership_DT(cfg.src, w, cfg.pol);
    neg = std::min({neg, m.residual, m.residual_alt});
  }
  r.measured = pos;
  r.detail = "negatives_min_residual=" + sci(neg) + " negatives_tol=" + sci(neg_tol);
  r.pass = pos < r.tol && neg > neg_tol;
  return r;
}

CheckResult sign_theorem(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(9, "sign theorem: B(u,v)>0 (D-case), C(u,v)<0 (A-case), 5 adjacent pairs");
  r.tol = 0.0;
  r.N = cfg.pol.working_n();
  RootScanConfig below;
  below.lo = -80.0;
  double minB = INFINITY, maxC = -INFINITY;
  for (int k = 0; k < 5; ++k) {
    const double v = rng.uniform(-5.0, 20.0);
    minB = std::min(minB, adjacent_zero_sign(cfg.src, v, below, ZeroCase::D_case, cfg.pol).value);
    maxC = std::max(maxC, adjacent_zero_sign(cfg.src, v, below, ZeroCase::A_case, cfg.pol).value);
  }
  r.measured = minB;
  r.detail = "min_B=" + sci(minB) + " max_C=" + sci(maxC);
  r.pass = minB > 0.0 && maxC < 0.0;
  return r;
}

CheckResult extension_domains(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(10, "D(T_t): p_lambda at zeros of B+tD, resolvent combination and c-decomposition");
  r.tol = kMembershipTol;
  r.N = cfg.pol.working_n();
  RootScanConfig win;
  win.lo = -30.0;
  win.hi = 30.0;
  bool ok = true;
  std::ostringstream d;
  int wrong = 0;
  for (const ExtensionParam& t : kTs) {
    const auto pts = nextremal_support(cfg.src, t, win, cfg.pol);
    if (pts.empty()) throw Error("empty support in window");
    const double lam = pts[rng.below(pts.size())];
    const SeqVector p = truncated_p(cfg.src, lam, cfg.pol);
    if (!membership_DTt(cfg.src, p, t, cfg.pol).in_domain) ++wrong;
    const ExtensionParam others[2] = {
        t.is_infinite() ? ExtensionParam::finite(0.0) : ExtensionParam::finite(t.value() + 0.5),
        t.is_infinite() ? ExtensionParam::finite(-2.0) : ExtensionParam::infinity()};
    for (const ExtensionParam& o : others) {
      if (membership_DTt(cfg.src, p, o, cfg.pol).in_domain) ++wrong;
    }

    const DiscreteMeasure m = build_measure_auto(cfg.src, t, 6, cfg.pol);
    const cplx z = rng.in_box(-5.0, 5.0, 0.1, 3.0);
    const ResolventCombination rc = resolvent_combination(cfg.src, t, z, m, cfg.pol);
    if (!rc.verdict.in_domain || rc.in_DT.in_domain) ++wrong;
    r.measured = std::max(r.measured, worst_residual(rc.remainder));
  }
  d << "wrong_verdicts=" << wrong;
  r.detail = d.str();
  ok = wrong == 0 && r.measured < r.tol;
  r.pass = ok;
  return r;
}

CheckResult xi_suite(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(11, "Xi: resolvent identity, kernel, norm bounds, difference quotients, range in D(T)");
  r.tol = 1e-10;
  r.N = cfg.pol.working_n();
  for (int i = 0; i < 50; ++i) {
    const SeqVector c = random_finite(rng, 1 + rng.below(100));
    r.measured = std::max(r.measured, resolvent_residual(cfg.src, c, rng.in_disk(5.0), cfg.pol));
  }
  const bool kernel_ok = xi_apply(cfg.src, SeqVector::unit(0), kBasepoint, cfg.pol).is_zero();
  bool bounds_ok = true;
  double slack = INFINITY;
  for (const cplx z0 : {kBasepoint, kBasepointAlt}) {
    const BoundReport b = bound_suite(cfg.src, z0, cfg.pol, rng.below(1u << 30));
    bounds_ok = bounds_ok && b.all_ok();
    for (const BoundCheck& c : b.checks) slack = std::min(slack, 1.0 - c.max_ratio);
  }
  const double dq_tol = 1e-11;
  double dq = 0.0;
  for (int i = 0; i < 30; ++i) {
    const SeqVector c = random_finite(rng, 1 + rng.below(60));
    dq = std::max(dq, diff_quotient_residual(cfg.src, c, rng.in_disk(3.0), rng.in_disk(3.0), cfg.pol));
  }
  double range = 0.0;
  bool range_ok = true;
  for (int i = 0; i < 10; ++i) {
    const SeqVector x = xi_apply(cfg.src, random_finite(rng, 1 + rng.below(100)), rng.in_disk(3.0), cfg.pol);
    const MembershipVerdict m = membership_DT(cfg.src, x, cfg.pol);
    range_ok = range_ok && m.in_domain;
    range = std::max(range, worst_residual(m));
  }
  r.detail = "xi(e0)=0:" + std::string(kernel_ok ? "yes" : "no") + " min_bound_slack=" + sci(slack) +
             " diff_quotient=" + sci(dq) + " diff_quotient_tol=" + sci(dq_tol) +
             " range_residual=" + sci(range) + " range_tol=" + sci(kMembershipTol);
  r.pass = r.measured < r.tol && kernel_ok && bounds_ok && slack >= 0.0 && dq < dq_tol && range_ok;
  return r;
}

CheckResult tilde(const AcceptanceConfig& cfg, Rng& rng) {
  CheckResult r = start(12, "relations with the once-truncated problem at 10 points");
  r.tol = 1e-8;
  r.N = cfg.pol.n_max;
  for (int i = 0; i < 10; ++i) {
    const cplx u = rng.in_disk(3.0), v = rng.in_disk(3.0);
    r.measured = std::max(r.measured, tilde_relations_residual(cfg.src, u, v, cfg.pol));
  }
  r.pass = r.measured < r.tol;
  return r;
}

}  // namespace

CheckResult run_criterion(int id, const AcceptanceConfig& cfg) {
  using Fn = CheckResult (*)(const AcceptanceConfig&, Rng&);
  static const Fn table[kCriteria] = {det_identity, dual_form,   three_point,  pick,
                                      measures,     disjoint_supports, stieltjes_consistency,
                                      membership,   sign_theorem, extension_domains,
                                      xi_suite,     tilde};
  if (id < 1 || id > kCriteria) throw Error("unknown acceptance criterion " + std::to_string(id));
  Rng rng(cfg.seed + static_cast<std::uint64_t>(id));
  try {
    return table[id - 1](cfg, rng);
  } catch (const std::exception& e) {
    CheckResult r;
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.N = cfg.pol.working_n();
    r.detail = std::string("error: ") + e.what();
    return r;
  }
}

std::vector<CheckResult> run_acceptance(const AcceptanceConfig& cfg) {
  std::vector<CheckResult> out;
  for (int id = 1; id <= kCriteria; ++id) out.push_back(run_criterion(id, cfg));
  return out;
}

std::string format_check(const CheckResult& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS" : "FAIL") << ' ' << (r.id < 10 ? " " : "") << r.id << ' ' << r.name
    << " | measured=" << sci(r.measured) << " tol=" << sci(r.tol) << " N=" << r.N;
  if (!r.detail.empty()) s << " | " << r.detail;
  return s.str();
}

}  // namespace indet
