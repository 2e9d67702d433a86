#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmf/error.hpp"

namespace kmf {

bool is_prime_u64(uint64_t n);

// Description of F_q, q = p^m. For m > 1 the field is F_p[x]/(modulus) with a
// monic irreducible modulus of degree m. Built-in default moduli exist for
// q in {4, 8, 9, 16, 25, 27}; for other prime powers the lexicographically
// smallest monic irreducible polynomial is used.
struct FieldSpec {
  uint64_t p = 0;
  unsigned m = 1;
  std::vector<uint64_t> modulus; // little-endian coefficients, size m+1, monic

  static FieldSpec prime(uint64_t p);
  static FieldSpec extension(uint64_t p, unsigned m);
  static FieldSpec extension(uint64_t p, std::vector<uint64_t> modulus);
  // Parses q = p^m and picks the default modulus.
  static FieldSpec from_q(uint64_t q);
};

enum class Gate { QGt3, PGt2, Both };

// Arithmetic context for one finite field. Elements are canonical codes in
// [0, q): the code of (c_0, ..., c_{m-1}) is the big-endian base-p integer
// with c_0 as the most significant digit, so ascending code order is
// lexicographic order on coefficient tuples.
class Field {
public:
  using El = uint16_t;

  explicit Field(const FieldSpec& spec);

  uint64_t p() const { return p_; }
  unsigned deg() const { return m_; }
  uint64_t q() const { return q_; }
  const FieldSpec& spec() const { return spec_; }

  El zero() const { return 0; }
  El one() const { return one_; }
  El two() const { return from_int(2); }

  El add(El a, El b) const { return add_[idx(a, b)]; }
  El sub(El a, El b) const { return add_[idx(a, neg_[b])]; }
  El neg(El a) const { return neg_[a]; }
  El mul(El a, El b) const { return mul_[idx(a, b)]; }
  El inv(El a) const {
    if (a == 0) throw Error("DivisionByZero", "inverse of 0 in F_" + std::to_string(q_));
    return inv_[a];
  }
  El div(El a, El b) const { return mul(a, inv(b)); }
  El pow(El a, long long e) const;
  El from_int(long long v) const;

  // All q elements in canonical order; refuses fields beyond the sweep cap.
  std::vector<El> elements(uint64_t cap = 49) const;
  std::vector<El> nonzero_elements(uint64_t cap = 49) const;

  // {1, x, x^2, ...}: an F_p-basis of the field, enough to generate (k, +).
  std::vector<El> basis_elements() const;

  std::vector<unsigned> coeffs(El a) const; // little-endian (c_0, ..., c_{m-1})
  std::string to_string(El a) const;        // "3" for m = 1, "(1,2)" for m > 1

  // Multiplicative order of a nonzero element.
  uint64_t mult_order(El a) const;

  bool gate_ok(Gate g) const;
  // Throws Error("GateFailed", ...) when the named hypothesis is unmet.
  void require_gate(Gate g, const std::string& context) const;

private:
  size_t idx(El a, El b) const { return size_t(a) * q_ + b; }

  FieldSpec spec_;
  uint64_t p_;
  unsigned m_;
  uint64_t q_;
  El one_;
  std::vector<El> add_, mul_; // q*q tables
  std::vector<El> neg_, inv_; // q tables (inv_[0] unused)
};

} // namespace kmf
