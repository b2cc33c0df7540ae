#include <cmath>

#include "doctest.h"
#include "indet/nevanlinna.hpp"
#include "indet/rng.hpp"

using namespace indet;

namespace {

const JacobiCoefficients kPower = JacobiCoefficients::power_law(2.0);

TruncationPolicy fixed(std::size_t n) {
  TruncationPolicy p;
  p.fixed_n = n;
  return p;
}

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

void check_quad(const NevQuad& q, cplx A, cplx B, cplx C, cplx D, double tol) {
  CHECK(rel(q.A, A) < tol);
  CHECK(rel(q.B, B) < tol);
  CHECK(rel(q.C, C) < tol);
  CHECK(rel(q.D, D) < tol);
}

}  // namespace

TEST_CASE("nev_partial on the diagonal and at n = 0") {
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const cplx u = rng.in_disk(3.0);
    const NevQuad q = nev_partial(kPower, u, u, 40);
    CHECK(q.A == cplx(0.0));
    CHECK(q.B == cplx(-1.0));
    CHECK(q.C == cplx(1.0));
    CHECK(q.D == cplx(0.0));
    CHECK(q.cross_err < 1e-12);
    const NevQuad z = nev_partial(kPower, u, rng.in_disk(3.0), 0);
    CHECK(z.B == cplx(-1.0));
    CHECK(z.A == cplx(0.0));
  }
}

TEST_CASE("nev_partial matches exact summation at u=1, v=-1, n=50") {
  // tests/oracles/exact_recurrence.py
  const cplx A = 2.447633979376891, B = 1.766852451454655, C = -1.766852451454655,
             D = -0.8668647367575262;
  const NevQuad q = nev_partial(kPower, 1.0, -1.0, 50);
  check_quad(q, A, B, C, D, 1e-12);
  CHECK(q.cross_err < 1e-12);
  check_quad(nev_partial(kPower, 1.0, -1.0, 50, Precision::extended), A, B, C, D, 1e-15);
}

TEST_CASE("one-variable functions match exact summation to N = 300") {
  // tests/oracles/exact_recurrence.py
  check_quad(nev(kPower, 1.0, 0.0, fixed(300)), 1.42227386366147, 0.4600700870370216,
             0.8666715101165764, 0.9834460667729504, 1e-12);
  const NevQuad qi = nev_one(kPower, cplx(0, 1), fixed(300));
  check_quad(qi, cplx(0, 1.5026940383530105), -2.540796053263224, 1.13578333691167,
             cplx(0, 1.2549419719893091), 1e-12);
  CHECK(qi.det_residual() < 1e-10);
  CHECK(std::imag(qi.B / qi.D) > 0.0);
}

TEST_CASE("nev examples") {
  const NevQuad z = nev(kPower, 0.0, 0.0, {});
  CHECK(z.A == cplx(0.0));
  CHECK(z.B == cplx(-1.0));
  CHECK(z.C == cplx(1.0));
  CHECK(z.D == cplx(0.0));

  const NevQuad c = nev(kPower, cplx(0, 1), cplx(0, -1), {});
  CHECK(c.converged);
  CHECK(std::abs(std::real(c.A)) < 1e-14);
  const PolyEval ev = eval_pq_fixed(kPower, cplx(0, 1), c.N);
  CHECK(std::imag(c.A) == doctest::Approx(2.0 * ev.cum_q2).epsilon(1e-13));

  const NevQuad o = nev_one(kPower, 0.0, {});
  CHECK(o.A == cplx(0.0));
  CHECK(o.D == cplx(0.0));

  TruncationPolicy tight;
  tight.n_max = 10;
  tight.tail_tol = 1e-12;
  const NevQuad capped = nev(kPower, cplx(2, 1), 0.5, tight);
  CHECK_FALSE(capped.converged);
  CHECK(capped.N == 10);
}

TEST_CASE("series and Casorati forms agree for n <= 200") {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const cplx u = rng.in_disk(3.0), v = rng.in_disk(3.0);
    for (std::size_t n : {1u, 7u, 50u, 120u, 200u}) {
      const NevQuad q = nev_partial(kPower, u, v, n);
      const double scale = std::max({1.0, std::abs(q.A), std::abs(q.B), std::abs(q.C), std::abs(q.D)});
      CHECK(q.cross_err / scale < 1e-12);
    }
  }
}

TEST_CASE("determinant identity on a random grid") {
  Rng rng(3);
  std::vector<cplx> us, vs;
  for (int i = 0; i < 10; ++i) us.push_back(rng.in_disk(3.0));
  for (int i = 0; i < 10; ++i) vs.push_back(rng.in_disk(3.0));
  for (const cplx u : us) {
    for (const cplx v : vs) {
      const NevQuad q = nev(kPower, u, v, {});
      CHECK(q.det_residual() < 1e-9);
    }
  }
}

TEST_CASE("antisymmetry") {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const cplx u = rng.in_disk(3.0), v = rng.in_disk(3.0);
    const NevQuad a = nev_partial(kPower, u, v, 150), b = nev_partial(kPower, v, u, 150);
    CHECK(std::abs(a.A + b.A) < 1e-10);
    CHECK(std::abs(a.D + b.D) < 1e-10);
    CHECK(std::abs(a.B + b.C) < 1e-10);
  }
}

TEST_CASE("reconstruction from one-variable values") {
  const NevQuad d = reconstruct_two_var(kPower, 1.5, 1.5, {});
  CHECK(std::abs(d.B + 1.0) < 1e-12);
  CHECK(std::abs(d.A) < 1e-12);

  const NevQuad r = reconstruct_two_var(kPower, cplx(0.5, 1.0), 0.0, {});
  const NevQuad o = nev(kPower, cplx(0.5, 1.0), 0.0, {});
  check_quad(r, o.A, o.B, o.C, o.D, 1e-12);

  const NevQuad pm = reconstruct_two_var(kPower, 1.0, -1.0, {});
  const NevQuad dir = nev(kPower, 1.0, -1.0, {});
  check_quad(pm, dir.A, dir.B, dir.C, dir.D, 1e-9);
  CHECK(pm.cross_err < 1e-9);

  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const cplx u = rng.in_disk(3.0), v = rng.in_disk(3.0);
    CHECK(reconstruct_two_var(kPower, u, v, {}).cross_err < 1e-9);
  }
}

TEST_CASE("three-point formulas") {
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const cplx u = rng.in_disk(2.0), v = rng.in_disk(2.0), w = rng.in_disk(2.0);
    CHECK(three_point_residual(kPower, u, v, w, {}) < 1e-8);
    CHECK(three_point_residual(kPower, u, v, v, {}) < 1e-13);
    CHECK(three_point_residual(kPower, u, v, u, {}) < 1e-13);
  }
}

TEST_CASE("transfer matrices") {
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    const cplx u = rng.in_disk(2.0), v = rng.in_disk(2.0), w = rng.in_disk(2.0);
    for (std::size_t n : {0u, 1u, 10u, 60u, 100u}) {
      const Mat2 huv = transfer(kPower, u, v, n).entries;
      const Mat2 huw = transfer(kPower, u, w, n).entries;
      const Mat2 hwv = transfer(kPower, w, v, n).entries;
      const Mat2 hvu = transfer(kPower, v, u, n).entries;
      const double scale = std::max(1.0, huv.max_abs());
      CHECK(std::abs(huv.det() - 1.0) < 1e-12 * scale * scale);
      CHECK((huw * hwv - huv).max_abs() / scale < 1e-10);
      CHECK((hvu.inverse() - huv).max_abs() / scale < 1e-10);
      CHECK(((transfer(kPower, u, u, n).entries) - Mat2::identity()).max_abs() == 0.0);
      CHECK(transfer_residual(kPower, u, v, n) < 1e-10);
    }
  }
}

TEST_CASE("Mobius action") {
  const TruncationPolicy pol;
  CHECK(mobius(kPower, 0.7, 0.7, cplx(2, 3), pol).value() == cplx(2, 3));
  CHECK(mobius(kPower, 0.7, 0.7, ExtComplex::infinity(), pol).is_infinite());
  CHECK_THROWS_AS(ExtComplex::infinity().value(), DomainError);

  const ExtComplex re = mobius(kPower, 1.2, -0.4, cplx(0.3), pol);
  CHECK(std::imag(re.value()) == 0.0);

  Rng rng(8);
  const cplx u(0.5, 1.0), w(-1.0, 0.2), v(0.3, -0.8);
  const std::size_t N = 400;
  const NevQuad uw = nev_partial(kPower, u, w, N), wv = nev_partial(kPower, w, v, N),
                uv = nev_partial(kPower, u, v, N);
  for (int i = 0; i < 20; ++i) {
    const cplx z = rng.in_disk(5.0);
    const cplx lhs = mobius_apply(uw, mobius_apply(wv, z)).value();
    const cplx rhs = mobius_apply(uv, z).value();
    CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)) < 1e-9);
  }
  // Pole: z = -B/D maps to infinity, and infinity maps to -C/D.
  const NevQuad q = nev_partial(kPower, 1.0, 0.0, 4);
  const NevQuad pole{q.u, q.v, q.A, 2.0, q.C, -2.0, q.N, 0.0, true};
  CHECK(mobius_apply(pole, cplx(1.0)).is_infinite());
  CHECK(mobius_apply(pole, ExtComplex::infinity()).value() == q.C / 2.0);
}

TEST_CASE("relations with the once-truncated problem") {
  const TruncationPolicy pol;
  CHECK(tilde_relations_residual(kPower, cplx(0, 1), cplx(0, 1), pol) < 1e-8);
  CHECK(tilde_relations_residual(kPower, 0.0, 0.0, pol) < 1e-14);
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    CHECK(tilde_relations_residual(kPower, rng.in_disk(3.0), rng.in_disk(3.0), pol) < 1e-8);
  }
  const auto ex = JacobiCoefficients::explicit_list(
      {{1.5, 0.3}}, [](std::size_t n) { return Coeff{std::pow(n + 1.0, 2.2), std::sin(double(n))}; });
  CHECK(tilde_relations_residual(ex, cplx(0.4, 0.9), -0.7, pol) < 1e-8);
}

TEST_CASE("Pick property of B/D and A/C") {
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    const cplx z = rng.in_box(-5.0, 5.0, 0.01, 5.0);
    const NevQuad q = nev_one(kPower, z, {});
    CHECK(std::imag(q.B / q.D) > 0.0);
    CHECK(std::imag(q.A / q.C) > 0.0);
  }
}

TEST_CASE("double determinant identity") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const std::array<cplx, 2> x{rng.in_disk(2), rng.in_disk(2)}, y{rng.in_disk(2), rng.in_disk(2)},
        w{rng.in_disk(2), rng.in_disk(2)}, z{rng.in_disk(2), rng.in_disk(2)};
    const cplx lhs = det2(x, y) * det2(w, z) - det2(x, z) * det2(w, y);
    CHECK(std::abs(lhs - det2(x, w) * det2(y, z)) < 1e-13);
  }
}

TEST_CASE("NevanlinnaSlice agrees with nev_partial") {
  Rng rng(12);
  const cplx v(0.3, -0.2);
  const NevanlinnaSlice s(kPower, v, 250);
  for (int i = 0; i < 10; ++i) {
    const cplx u = rng.in_disk(4.0);
    const NevQuad a = s.at(u), b = nev_partial(kPower, u, v, 250);
    check_quad(a, b.A, b.B, b.C, b.D, 1e-12);
    check_quad(s.at_extended(u), b.A, b.B, b.C, b.D, 1e-12);
    CHECK(std::abs(s.kernel_pp(u) * (u - v) - b.D) < 1e-12 * std::max(1.0, std::abs(b.D)));
    CHECK(std::abs(s.kernel_qq(u) * (u - v) - b.A) < 1e-12 * std::max(1.0, std::abs(b.A)));
  }
}
