#include <doctest.h>

#include <random>

#include "kmf/tseries.hpp"

using namespace kmf;

namespace {

Field f5() { return Field(FieldSpec::prime(5)); }

// 1 + u E_{ij} t^k
SMat elem(const Field& F, int dim, int N, int i, int j, long long u, int k) {
  return smat_elementary(F, dim, N, i, j, F.from_int(u), k);
}

// random product of elementary unipotents: pro-unipotent with det 1
SMat random_prounipotent(const Field& F, int dim, int N, std::mt19937& rng, int min_deg = 1) {
  SMat g = smat_identity(F, dim, N);
  for (int step = 0; step < 6; ++step) {
    int i = int(rng() % dim), j = int(rng() % dim);
    if (i == j) continue;
    int k = min_deg + int(rng() % (N - min_deg));
    g = smat_mul(F, g, smat_elementary(F, dim, N, i, j, Field::El(rng() % F.q()), k));
    // conjugating by a unipotent keeps det 1 and g = 1 mod t^min_deg
  }
  return g;
}

} // namespace

TEST_CASE("series matrix arithmetic basics") {
  Field F = f5();
  // inv(1 + u e12 t) = 1 - u e12 t
  SMat g = elem(F, 2, 4, 0, 1, 3, 1);
  SMat gi = smat_inv(F, g);
  CHECK(gi == elem(F, 2, 4, 0, 1, -3, 1));

  // det of e_0(u) is 1
  auto det = smat_det(F, elem(F, 2, 4, 0, 1, 2, 0));
  CHECK(det[0] == F.one());
  for (size_t k = 1; k < det.size(); ++k) CHECK(det[k] == 0);

  // (1 + A t)(1 - A t + A^2 t^2) = 1 mod t^3
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    SMat a = smat_zero(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a.at(i, j, 0) = Field::El(rng() % 5);
    SMat one_at = smat_identity(F, 3, 3);
    SMat lhs = one_at;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) lhs.at(i, j, 1) = a.at(i, j, 0);
    SMat a2 = smat_mul(F, a, a);
    SMat rhs = one_at;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        rhs.at(i, j, 1) = F.neg(a.at(i, j, 0));
        rhs.at(i, j, 2) = a2.at(i, j, 0);
      }
    CHECK(smat_mul(F, lhs, rhs) == one_at);
  }
}

TEST_CASE("sigma-star") {
  Field F = f5();
  // (1 + u e13 t)* = 1 - u e31 t
  CHECK(sigma_star(F, elem(F, 3, 3, 0, 2, 2, 1)) == elem(F, 3, 3, 2, 0, -2, 1));
  // constant diagonal is fixed
  SMat d = smat_identity(F, 3, 3);
  d.at(0, 0, 0) = F.from_int(3);
  CHECK(sigma_star(F, d) == d);
  // J* = J
  SMat J = hermitian_form_J(F, 3);
  CHECK(sigma_star(F, J) == J);
  // anti-automorphism: (gh)* = h* g*
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    SMat g = random_prounipotent(F, 3, 4, rng);
    SMat h = random_prounipotent(F, 3, 4, rng);
    CHECK(sigma_star(F, smat_mul(F, g, h)) == smat_mul(F, sigma_star(F, h), sigma_star(F, g)));
  }
  // involution
  std::mt19937 rng2(13);
  SMat g = random_prounipotent(F, 3, 4, rng2);
  CHECK(sigma_star(F, sigma_star(F, g)) == g);
}

TEST_CASE("unitarity predicate") {
  Field F = f5();
  for (auto u : F.nonzero_elements()) {
    CHECK(is_unitary(F, smat_elementary(F, 3, 3, 0, 2, u, 1)));      // 1 + u e13 t
    CHECK_FALSE(is_unitary(F, smat_elementary(F, 3, 3, 0, 1, u, 1))); // 1 + u e12 t
  }
  SMat J = hermitian_form_J(F, 3);
  CHECK(is_unitary(F, J));
}

TEST_CASE("degree and leading coefficient") {
  Field F = f5();
  auto d = degree_lc(F, elem(F, 2, 4, 0, 1, 3, 2));
  CHECK_FALSE(d.infinite);
  CHECK(d.degree == 2);
  CHECK(d.lc == std::vector<Field::El>{0, F.from_int(3), 0, 0});

  CHECK(degree_lc(F, smat_identity(F, 2, 4)).infinite);

  auto e1 = degree_lc(F, elem(F, 2, 4, 0, 1, 4, 1));
  CHECK(e1.degree == 1);

  SMat notpro = elem(F, 2, 4, 0, 1, 1, 0);
  CHECK_THROWS_WITH_AS(degree_lc(F, notpro), doctest::Contains("NotProUnipotent"), Error);
}

TEST_CASE("congruence levels") {
  Field F = f5();
  SMat g = elem(F, 2, 4, 0, 1, 1, 2); // 1 + t^2 E12
  CHECK(congruence_level(F, g, 2));
  CHECK_FALSE(congruence_level(F, elem(F, 2, 4, 0, 1, 1, 1), 2));
  CHECK(congruence_level(F, smat_identity(F, 2, 4), 3));
  CHECK_THROWS_WITH_AS(congruence_level(F, g, 4), doctest::Contains("LevelOutOfRange"), Error);
}

TEST_CASE("filtration facts for degrees and leading coefficients") {
  Field F = f5();
  std::mt19937 rng(41);
  int checked_pairs = 0;
  for (int trial = 0; trial < 200 && checked_pairs < 100; ++trial) {
    SMat g = random_prounipotent(F, 2, 5, rng);
    SMat h = random_prounipotent(F, 2, 5, rng);
    auto dg = degree_lc(F, g), dh = degree_lc(F, h);
    if (dg.infinite || dh.infinite) continue;
    ++checked_pairs;

    auto dgh = degree_lc(F, smat_mul(F, g, h));
    if (!dgh.infinite) CHECK(dgh.degree >= std::min(dg.degree, dh.degree));
    if (dg.degree < dh.degree) {
      REQUIRE_FALSE(dgh.infinite);
      CHECK(dgh.degree == dg.degree);
      CHECK(dgh.lc == dg.lc);
    }

    auto dginv = degree_lc(F, smat_inv(F, g));
    REQUIRE_FALSE(dginv.infinite);
    CHECK(dginv.degree == dg.degree);
    std::vector<Field::El> neglc = dg.lc;
    for (auto& x : neglc) x = F.neg(x);
    CHECK(dginv.lc == neglc);

    // deg([g,h]) >= deg g + deg h (or trivial at truncation)
    SMat c = smat_commutator(F, g, h);
    auto dc = degree_lc(F, c);
    if (dg.degree + dh.degree >= 5) {
      CHECK(dc.infinite);
    } else if (!dc.infinite) {
      CHECK(dc.degree >= dg.degree + dh.degree);
    }

    // trace of LC vanishes for determinant-1 elements
    Field::El tr = 0;
    for (int i = 0; i < 2; ++i) tr = F.add(tr, dg.lc[size_t(i * 2 + i)]);
    CHECK(tr == 0);
  }
  CHECK(checked_pairs >= 50);
}

TEST_CASE("negative exponents are rejected") {
  Field F = f5();
  CHECK_THROWS_WITH_AS(smat_elementary(F, 2, 4, 0, 1, F.one(), -1), doctest::Contains("NegativeDegree"),
                       Error);
}

TEST_CASE("pack and unpack round-trip") {
  Field F = f5();
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    SMat g = random_prounipotent(F, 3, 3, rng);
    CHECK(smat_unpack(F, 3, 3, smat_pack(F, g)) == g);
  }
  smat_key_check(F, 3, 3);
  Field F9(FieldSpec::from_q(9));
  CHECK_THROWS_WITH_AS(smat_key_check(F9, 4, 16), doctest::Contains("KeyOverflow"), Error);
}

TEST_CASE("series inversion and truncation helpers") {
  Field F = f5();
  std::vector<Field::El> s{F.one(), F.from_int(1), 0}; // 1 + t
  auto inv = series_invert(F, s);
  CHECK(inv == std::vector<Field::El>{F.one(), F.from_int(-1), F.from_int(1)}); // 1 - t + t^2

  SMat g = elem(F, 2, 4, 0, 1, 3, 2);
  SMat t = smat_truncate(g, 2);
  CHECK(t.N == 2);
  CHECK(t == smat_identity(F, 2, 2));
}
