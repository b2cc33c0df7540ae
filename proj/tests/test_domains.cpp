#include <cmath>

#include "doctest.h"
#include "indet/domains.hpp"
#include "indet/rng.hpp"

using namespace indet;

namespace {

const JacobiCoefficients kPower = JacobiCoefficients::power_law(2.0);
const TruncationPolicy kPol;

RootScanConfig window(double lo, double hi) {
  RootScanConfig c;
  c.lo = lo;
  c.hi = hi;
  return c;
}

SeqVector random_finite(Rng& rng, std::size_t M) {
  std::vector<cplx> e(M + 1);
  for (auto& c : e) c = rng.in_disk(1.0);
  return SeqVector(e);
}

double pnorm2(cplx z0) { return eval_pq_fixed(kPower, z0, kPol.working_n()).cum_p2; }

}  // namespace

TEST_CASE("residues: deficiency vectors themselves") {
  for (cplx z0 : {kBasepoint, kBasepointAlt, cplx(-3, 0.5)}) {
    const Residues rp = residues(kPower, truncated_p(kPower, z0, kPol), z0, kPol);
    CHECK(std::abs(rp.alpha - 1.0) < 1e-12);
    CHECK(std::abs(rp.beta) < 1e-12);
    const Residues rb = residues(kPower, truncated_p(kPower, std::conj(z0), kPol), z0, kPol);
    CHECK(std::abs(rb.alpha) < 1e-12);
    CHECK(std::abs(rb.beta - 1.0) < 1e-12);
    const Residues rq = residues(kPower, truncated_q(kPower, z0, kPol), z0, kPol);
    const cplx want = -1.0 / (cplx(0, 2 * z0.imag()) * pnorm2(z0));
    CHECK(std::abs(rq.beta - want) < 1e-12 * std::abs(want));
  }
  CHECK_THROWS_AS(residues(kPower, SeqVector::unit(0), cplx(1, 0), kPol), DomainError);
  CHECK_THROWS_AS(residues(kPower, SeqVector::unit(0), cplx(1, -1), kPol), DomainError);
}

TEST_CASE("residues: finite vectors and their algebra") {
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const SeqVector c = random_finite(rng, rng.below(600));
    const Residues r = residues(kPower, c, kBasepoint, kPol);
    CHECK(std::abs(r.alpha) < 1e-10 * std::max(1.0, c.norm()));
    CHECK(std::abs(r.beta) < 1e-10 * std::max(1.0, c.norm()));
  }
  // Linearity and conjugation on mixed (truncated) vectors.
  for (int i = 0; i < 10; ++i) {
    const cplx lam = rng.in_disk(4.0), mu = rng.in_disk(4.0);
    const SeqVector v = truncated_p(kPower, lam, kPol);
    const SeqVector w = truncated_q(kPower, mu, kPol) + random_finite(rng, 30);
    const cplx a = rng.in_disk(2.0), b = rng.in_disk(2.0);
    const Residues rv = residues(kPower, v, kBasepoint, kPol);
    const Residues rw = residues(kPower, w, kBasepoint, kPol);
    const Residues rs = residues(kPower, a * v + b * w, kBasepoint, kPol);
    const double scale = std::max({1.0, std::abs(rv.alpha), std::abs(rw.alpha), std::abs(rv.beta), std::abs(rw.beta)});
    CHECK(std::abs(rs.alpha - (a * rv.alpha + b * rw.alpha)) < 1e-12 * scale * 4);
    CHECK(std::abs(rs.beta - (a * rv.beta + b * rw.beta)) < 1e-12 * scale * 4);
    const Residues rc = residues(kPower, v.conj(), kBasepoint, kPol);
    CHECK(std::abs(rc.alpha - std::conj(rv.beta)) < 1e-12 * scale);
    CHECK(std::abs(rc.beta - std::conj(rv.alpha)) < 1e-12 * scale);
  }
  // Real lambda: |alpha| = |beta| > 0.
  for (double x : {-3.0, 0.0, 0.7, 12.0}) {
    const Residues r = residues(kPower, truncated_p(kPower, x, kPol), kBasepoint, kPol);
    CHECK(std::abs(r.alpha) > 1e-6);
    CHECK(std::abs(std::abs(r.alpha) - std::abs(r.beta)) < 1e-12 * std::abs(r.alpha));
  }
}

TEST_CASE("s and r coefficients") {
  Rng rng(32);
  for (cplx z0 : {kBasepoint, kBasepointAlt}) {
    const SRCoefficients at = s_r_coefficients(kPower, z0, z0, kPol);
    CHECK(std::abs(at.s_plus - 1.0) < 1e-12);
    CHECK(std::abs(at.s_minus) < 1e-12);
    const SRCoefficients bar = s_r_coefficients(kPower, std::conj(z0), z0, kPol);
    CHECK(std::abs(bar.s_plus) < 1e-12);
    CHECK(std::abs(bar.s_minus - 1.0) < 1e-12);
    for (int i = 0; i < 10; ++i) {
      const cplx lam = rng.in_disk(5.0);
      const SRCoefficients sr = s_r_coefficients(kPower, lam, z0, kPol);
      const Residues rp = residues(kPower, truncated_p(kPower, lam, kPol), z0, kPol);
      const Residues rq = residues(kPower, truncated_q(kPower, lam, kPol), z0, kPol);
      CHECK(std::abs(sr.s_plus - rp.alpha) < 1e-8);
      CHECK(std::abs(sr.s_minus - rp.beta) < 1e-8);
      CHECK(std::abs(sr.r_plus - rq.alpha) < 1e-8);
      CHECK(std::abs(sr.r_minus - rq.beta) < 1e-8);
      const double x = lam.real();
      const SRCoefficients re = s_r_coefficients(kPower, x, z0, kPol);
      CHECK(std::abs(re.s_minus - std::conj(re.s_plus)) < 1e-12);
    }
  }
}

TEST_CASE("membership in D(T)") {
  Rng rng(33);
  for (int i = 0; i < 10; ++i) {
    const MembershipVerdict v = membership_DT(kPower, random_finite(rng, 1 + rng.below(80)), kPol);
    CHECK(v.in_domain);
    CHECK(v.domain_tag == "D(T)");
    CHECK(v.N == kPol.working_n());
    const cplx lam = rng.in_disk(5.0);
    CHECK_FALSE(membership_DT(kPower, truncated_p(kPower, lam, kPol), kPol).in_domain);
    CHECK_FALSE(membership_DT(kPower, truncated_q(kPower, lam, kPol), kPol).in_domain);
  }
  const MembershipVerdict zero = membership_DT(kPower, SeqVector::unit(3) - SeqVector::unit(3), kPol);
  CHECK(zero.in_domain);
  CHECK(zero.degenerate);
}

TEST_CASE("pair coefficients and the main membership theorem") {
  Rng rng(34);
  for (PairCase c : {PairCase::pp, PairCase::qq, PairCase::pq}) {
    CHECK_FALSE(pair_coefficient(kPower, 1.3, 1.3, c, kPol).has_value());
  }
  const RootScanConfig below = window(-80.0, 0.0);
  for (int k = 0; k < 5; ++k) {
    const double v = rng.uniform(-5.0, 20.0);
    // D(u,v) = 0: p_u + B(u,v) p_v in D(T), with B(u,v) > 0.
    const AdjacentZero dz = adjacent_zero_sign(kPower, v, below, ZeroCase::D_case, kPol);
    const auto alpha = pair_coefficient(kPower, dz.u, v, PairCase::pp, kPol);
    REQUIRE(alpha.has_value());
    CHECK(alpha->real() > 0.0);
    const SeqVector vp = pair_vector(kPower, dz.u, v, *alpha, PairCase::pp, kPol);
    CHECK(membership_DT(kPower, vp, kPol).in_domain);
    CHECK_FALSE(pair_coefficient(kPower, dz.u, v, PairCase::qq, kPol).has_value());

    // A(u,v) = 0: q_u - C(u,v) q_v in D(T).
    const AdjacentZero az = adjacent_zero_sign(kPower, v, below, ZeroCase::A_case, kPol);
    const auto beta = pair_coefficient(kPower, az.u, v, PairCase::qq, kPol);
    REQUIRE(beta.has_value());
    CHECK(membership_DT(kPower, pair_vector(kPower, az.u, v, *beta, PairCase::qq, kPol), kPol).in_domain);

    // B(u,v) = 0: p_u - D(u,v) q_v in D(T).
    const NevanlinnaSlice slice(kPower, v, kPol.working_n());
    const RealFn bu = [&](double u) { return std::real(slice.at(u).B); };
    const auto bz = real_zeros(bu, window(v - 40.0, v + 40.0)).zeros;
    REQUIRE_FALSE(bz.empty());
    const double u = bz[rng.below(bz.size())];
    const auto gamma = pair_coefficient(kPower, u, v, PairCase::pq, kPol);
    REQUIRE(gamma.has_value());
    CHECK(membership_DT(kPower, pair_vector(kPower, u, v, *gamma, PairCase::pq, kPol), kPol).in_domain);
  }
  // Negative controls.
  int tested = 0;
  while (tested < 20) {
    const cplx u = rng.in_disk(4.0), v = rng.in_disk(4.0);
    if (std::abs(nev_partial(kPower, u, v, kPol.working_n()).D) <= 0.1) continue;
    ++tested;
    CHECK_FALSE(pair_coefficient(kPower, u, v, PairCase::pp, kPol).has_value());
    const SeqVector w = pair_vector(kPower, u, v, rng.in_disk(3.0), PairCase::pp, kPol);
    const MembershipVerdict m = membership_DT(kPower, w, kPol);
    CHECK_FALSE(m.in_domain);
    CHECK(m.residual > 1e3 * m.tol);
  }
}

TEST_CASE("membership in D(T_t)") {
  const ExtensionParam t1 = ExtensionParam::finite(1.0);
  for (const ExtensionParam& t : {ExtensionParam::finite(0.0), t1, ExtensionParam::infinity(),
                                  ExtensionParam::finite(-3.0)}) {
    CAPTURE(t.str());
    CHECK(membership_DTt(kPower, extension_generator(kPower, t, kPol), t, kPol).in_domain);
    const auto pts = nextremal_support(kPower, t, window(-30.0, 30.0), kPol);
    for (double lam : pts) {
      CHECK(membership_DTt(kPower, truncated_p(kPower, lam, kPol), t, kPol).in_domain);
      CHECK_FALSE(membership_DTt(kPower, truncated_q(kPower, lam, kPol), t, kPol).in_domain);
      const ExtensionParam other = t.is_infinite() ? t1 : ExtensionParam::finite(t.value() + 0.5);
      CHECK_FALSE(membership_DTt(kPower, truncated_p(kPower, lam, kPol), other, kPol).in_domain);
    }
    // q_lambda with A(lambda) + t C(lambda) = 0.
    const NevanlinnaSlice s0(kPower, 0.0, kPol.working_n());
    const ComplexFn ac = [&](cplx z) {
      const NevQuad q = s0.at(z);
      return t.is_infinite() ? q.C : q.A + t.value() * q.C;
    };
    const RealFn acr = [&](double x) { return std::real(ac(x)); };
    const auto qz = real_zeros(acr, window(-30.0, 30.0), &ac).zeros;
    REQUIRE_FALSE(qz.empty());
    for (double lam : qz) {
      CHECK(membership_DTt(kPower, truncated_q(kPower, lam, kPol), t, kPol).in_domain);
      CHECK_FALSE(membership_DTt(kPower, truncated_p(kPower, lam, kPol), t, kPol).in_domain);
    }
    // Finite vectors belong to every D(T_t).
    CHECK(membership_DTt(kPower, SeqVector::unit(4), t, kPol).in_domain);
  }
}

TEST_CASE("resolvent combination") {
  for (const ExtensionParam& t : {ExtensionParam::finite(0.0), ExtensionParam::finite(1.0),
                                  ExtensionParam::infinity()}) {
    CAPTURE(t.str());
    const DiscreteMeasure m = build_measure_auto(kPower, t, 2, kPol);
    for (cplx lam : {cplx(1, 1), cplx(-2.5, 0.3), cplx(4, -2)}) {
      const ResolventCombination rc = resolvent_combination(kPower, t, lam, m, kPol);
      CHECK(rc.verdict.in_domain);
      CHECK_FALSE(rc.in_DT.in_domain);
      CHECK(rc.remainder.in_domain);
      CHECK(rc.remainder.residual < 1e-7);
      const SeqVector shifted = (rc.w + 0.01) * truncated_p(kPower, lam, kPol) + truncated_q(kPower, lam, kPol);
      CHECK_FALSE(membership_DTt(kPower, shifted, t, kPol).in_domain);
    }
    CHECK_THROWS_AS(resolvent_combination(kPower, t, m.points[1], m, kPol), DomainError);
  }
}
