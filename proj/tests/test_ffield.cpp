#include <doctest.h>

#include "kmf/ffield.hpp"

using namespace kmf;

TEST_CASE("prime field arithmetic matches modular arithmetic") {
  Field F(FieldSpec::prime(5));
  CHECK(F.q() == 5);
  CHECK(F.inv(F.from_int(3)) == F.from_int(2)); // 3 * 2 = 6 = 1
  CHECK(F.mul(F.from_int(4), F.from_int(4)) == F.from_int(1));
  CHECK(F.add(F.from_int(4), F.from_int(3)) == F.from_int(2));
  CHECK(F.neg(F.from_int(2)) == F.from_int(3));
  CHECK_THROWS_WITH_AS(F.inv(0), doctest::Contains("DivisionByZero"), Error);
}

TEST_CASE("F9 = F3[x]/(x^2+1): x * x = 2") {
  Field F(FieldSpec::from_q(9));
  CHECK(F.p() == 3);
  CHECK(F.deg() == 2);
  // x has coefficients (0, 1): code 0*3 + 1 = 1
  Field::El x = 1;
  CHECK(F.coeffs(x) == std::vector<unsigned>{0, 1});
  CHECK(F.mul(x, x) == F.from_int(2));
  CHECK(F.to_string(x) == "(0,1)");
}

TEST_CASE("element enumeration is lexicographic on coefficient tuples") {
  Field F2(FieldSpec::prime(2));
  CHECK(F2.elements() == std::vector<Field::El>{0, 1});
  Field F5(FieldSpec::prime(5));
  CHECK(F5.elements() == std::vector<Field::El>{0, 1, 2, 3, 4});
  Field F9(FieldSpec::from_q(9));
  CHECK(F9.elements().size() == 9);
  // lex order: (0,0) < (0,1) < (0,2) < (1,0) < ...
  CHECK(F9.coeffs(F9.elements()[2]) == std::vector<unsigned>{0, 2});
  CHECK(F9.coeffs(F9.elements()[3]) == std::vector<unsigned>{1, 0});
  CHECK_THROWS_WITH_AS(F9.elements(4), doctest::Contains("FieldTooLarge"), Error);
}

TEST_CASE("theorem gates") {
  Field F5(FieldSpec::prime(5));
  CHECK(F5.gate_ok(Gate::Both));
  Field F4(FieldSpec::from_q(4));
  CHECK(F4.gate_ok(Gate::QGt3));
  CHECK_FALSE(F4.gate_ok(Gate::PGt2));
  CHECK_THROWS_WITH_AS(F4.require_gate(Gate::PGt2, "test"), doctest::Contains("GateFailed"), Error);
  Field F3(FieldSpec::prime(3));
  CHECK_FALSE(F3.gate_ok(Gate::QGt3));
  CHECK_THROWS_WITH_AS(F3.require_gate(Gate::QGt3, "test"), doctest::Contains("GateFailed"), Error);
}

TEST_CASE("Frobenius sweep and cyclic multiplicative group for q <= 27") {
  for (uint64_t q : {2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27}) {
    Field F(FieldSpec::from_q(q));
    for (auto x : F.elements()) {
      CHECK(F.pow(x, (long long)q) == x);
      if (x != 0) CHECK(F.mul(F.inv(x), x) == F.one());
    }
    // some element of full order q-1 exists
    bool found = false;
    for (auto x : F.nonzero_elements()) {
      if (F.mult_order(x) == q - 1) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("field validation failures") {
  CHECK_THROWS_WITH_AS(Field(FieldSpec::prime(6)), doctest::Contains("NotPrime"), Error);
  CHECK_THROWS_WITH_AS(Field(FieldSpec::extension(5, {4, 0, 1})), doctest::Contains("BadModulus"),
                       Error); // x^2 + 4 = x^2 - 1 has roots
  CHECK_THROWS_WITH_AS(FieldSpec::from_q(12), doctest::Contains("BadFieldSize"), Error);
  CHECK_THROWS_WITH_AS(Field(FieldSpec::from_q(1024)), doctest::Contains("FieldTooLarge"), Error);
}

TEST_CASE("primality test") {
  CHECK(is_prime_u64(2));
  CHECK(is_prime_u64(7919));
  CHECK(is_prime_u64(2147483647ULL));
  CHECK(is_prime_u64(18446744073709551557ULL)); // largest prime < 2^64
  CHECK_FALSE(is_prime_u64(1));
  CHECK_FALSE(is_prime_u64(3215031751ULL)); // strong pseudoprime to bases 2,3,5,7
}

TEST_CASE("basis elements span the field additively") {
  Field F(FieldSpec::from_q(9));
  auto basis = F.basis_elements();
  REQUIRE(basis.size() == 2);
  CHECK(basis[0] == F.one());
  // 2*1 + 1*x has coefficients (2,1)
  Field::El v = F.add(F.add(basis[0], basis[0]), basis[1]);
  CHECK(F.coeffs(v) == std::vector<unsigned>{2, 1});
}
