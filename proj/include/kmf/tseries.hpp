#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kmf/ffield.hpp"

namespace kmf {

// Matrices over k[t]/(t^N). Dimensions up to 4 and truncation up to 16 keep
// everything inline; the group-closure code packs elements into 128-bit keys
// instead of storing matrices.
inline constexpr int kMaxDim = 4;
inline constexpr int kMaxTrunc = 16;

struct SMat {
  uint8_t dim = 0;
  uint8_t N = 0;
  // coefficient of t^k in entry (i,j) at [(i*dim + j)*N + k]
  std::array<Field::El, kMaxDim * kMaxDim * kMaxTrunc> c{};

  Field::El& at(int i, int j, int k) { return c[size_t((i * dim + j) * N + k)]; }
  Field::El at(int i, int j, int k) const { return c[size_t((i * dim + j) * N + k)]; }

  bool operator==(const SMat& o) const;
  bool operator!=(const SMat& o) const { return !(*this == o); }
};

SMat smat_zero(int dim, int N);
SMat smat_identity(const Field& F, int dim, int N);
// Constant matrix from entry codes (row-major).
SMat smat_const(const Field& F, int dim, int N, const std::vector<Field::El>& entries);
// 1 + u * E_{ij} * t^k
SMat smat_elementary(const Field& F, int dim, int N, int i, int j, Field::El u, int k);

SMat smat_add(const Field& F, const SMat& a, const SMat& b);
SMat smat_sub(const Field& F, const SMat& a, const SMat& b);
SMat smat_mul(const Field& F, const SMat& a, const SMat& b);
SMat smat_scale(const Field& F, Field::El s, const SMat& a);

// Truncated determinant (cofactor expansion; dim <= 4).
std::vector<Field::El> smat_det(const Field& F, const SMat& a);

// Inverse of a unit series (nonzero constant term).
std::vector<Field::El> series_invert(const Field& F, const std::vector<Field::El>& a);

// Forgets coefficients at t^n and above (n <= N).
SMat smat_truncate(const SMat& a, int n);

// Inverse when det has a unit constant term; Error("NonInvertible") otherwise.
SMat smat_inv(const Field& F, const SMat& a);

SMat smat_commutator(const Field& F, const SMat& a, const SMat& b); // a b a^-1 b^-1
SMat smat_pow(const Field& F, const SMat& a, uint64_t e);

// sigma-star: apply t -> -t to every entry, then transpose (dim 3 only).
SMat sigma_star(const Field& F, const SMat& g);

// The fixed anti-diagonal hermitian form J = antidiag(1, -1, 1).
SMat hermitian_form_J(const Field& F, int N);

// True iff J^-1 g* J g = 1 mod t^N.
bool is_unitary(const Field& F, const SMat& g);

struct DegreeLC {
  bool infinite = false; // identity at truncation
  int degree = 0;        // in [1, N-1] when finite
  std::vector<Field::El> lc; // dim*dim constant matrix, row-major
};

// First nonzero coefficient matrix of g - 1; requires g ≡ 1 mod t.
DegreeLC degree_lc(const Field& F, const SMat& g);

// g ≡ 1 mod t^n, i.e. constant term is the identity and coefficients 1..n-1 vanish.
bool congruence_level(const Field& F, const SMat& g, int n);

bool is_upper_unitriangular_mod_t(const Field& F, const SMat& g);

std::string smat_to_string(const Field& F, const SMat& g);

// Canonical 128-bit packing of the coefficient table (base-q digits, the
// (0,0,0) coefficient as the most significant digit). Requires q^(dim^2 N)
// to fit in 127 bits.
struct SMatKey {
  uint64_t hi = 0, lo = 0;
  bool operator==(const SMatKey& o) const { return hi == o.hi && lo == o.lo; }
  bool operator<(const SMatKey& o) const { return hi != o.hi ? hi < o.hi : lo < o.lo; }
};

struct SMatKeyHash {
  size_t operator()(const SMatKey& k) const {
    uint64_t x = k.hi * 0x9e3779b97f4a7c15ULL ^ (k.lo + 0xbf58476d1ce4e5b9ULL);
    x ^= x >> 31;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 29;
    return size_t(x);
  }
};

void smat_key_check(const Field& F, int dim, int N); // throws if packing overflows
SMatKey smat_pack(const Field& F, const SMat& a);
SMat smat_unpack(const Field& F, int dim, int N, const SMatKey& key);

} // namespace kmf
