#include "kmf/tseries.hpp"

#include <sstream>

namespace kmf {

bool SMat::operator==(const SMat& o) const {
  if (dim != o.dim || N != o.N) return false;
  size_t n = size_t(dim) * dim * N;
  for (size_t i = 0; i < n; ++i)
    if (c[i] != o.c[i]) return false;
  return true;
}

static void check_shape(int dim, int N) {
  if (dim < 1 || dim > kMaxDim) throw Error("BadShape", "matrix dimension must be 1..4");
  if (N < 1 || N > kMaxTrunc) throw Error("BadShape", "truncation level must be 1..16");
}

SMat smat_zero(int dim, int N) {
  check_shape(dim, N);
  SMat m;
  m.dim = uint8_t(dim);
  m.N = uint8_t(N);
  return m;
}

SMat smat_identity(const Field& F, int dim, int N) {
  SMat m = smat_zero(dim, N);
  for (int i = 0; i < dim; ++i) m.at(i, i, 0) = F.one();
  return m;
}

SMat smat_const(const Field& F, int dim, int N, const std::vector<Field::El>& entries) {
  (void)F;
  SMat m = smat_zero(dim, N);
  if (entries.size() != size_t(dim) * dim) throw Error("BadShape", "entry count mismatch");
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m.at(i, j, 0) = entries[size_t(i * dim + j)];
  return m;
}

SMat smat_elementary(const Field& F, int dim, int N, int i, int j, Field::El u, int k) {
  if (k < 0) throw Error("NegativeDegree", "negative t-exponents are not representable");
  SMat m = smat_identity(F, dim, N);
  if (k < N) m.at(i, j, k) = F.add(m.at(i, j, k), u);
  return m;
}

SMat smat_add(const Field& F, const SMat& a, const SMat& b) {
  SMat m = a;
  size_t n = size_t(a.dim) * a.dim * a.N;
  for (size_t i = 0; i < n; ++i) m.c[i] = F.add(a.c[i], b.c[i]);
  return m;
}

SMat smat_sub(const Field& F, const SMat& a, const SMat& b) {
  SMat m = a;
  size_t n = size_t(a.dim) * a.dim * a.N;
  for (size_t i = 0; i < n; ++i) m.c[i] = F.sub(a.c[i], b.c[i]);
  return m;
}

SMat smat_scale(const Field& F, Field::El s, const SMat& a) {
  SMat m = a;
  size_t n = size_t(a.dim) * a.dim * a.N;
  for (size_t i = 0; i < n; ++i) m.c[i] = F.mul(s, a.c[i]);
  return m;
}

SMat smat_mul(const Field& F, const SMat& a, const SMat& b) {
  if (a.dim != b.dim || a.N != b.N) throw Error("BadShape", "shape mismatch in multiplication");
  int dim = a.dim, N = a.N;
  SMat m = smat_zero(dim, N);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) {
      for (int s = 0; s < N; ++s) {
        Field::El av = a.at(i, k, s);
        if (av == 0) continue;
        for (int j = 0; j < dim; ++j) {
          for (int t = 0; t + s < N; ++t) {
            Field::El bv = b.at(k, j, t);
            if (bv == 0) continue;
            m.at(i, j, s + t) = F.add(m.at(i, j, s + t), F.mul(av, bv));
          }
        }
      }
    }
  }
  return m;
}

namespace {

using Series = std::vector<Field::El>;

Series series_mul(const Field& F, const Series& a, const Series& b, int N) {
  Series c(size_t(N), 0);
  for (int s = 0; s < N; ++s) {
    if (a[size_t(s)] == 0) continue;
    for (int t = 0; t + s < N; ++t)
      c[size_t(s + t)] = F.add(c[size_t(s + t)], F.mul(a[size_t(s)], b[size_t(t)]));
  }
  return c;
}

// Inverse of a unit series (nonzero constant term).
Series series_inv(const Field& F, const Series& a, int N) {
  if (a[0] == 0) throw Error("NonInvertible", "series has zero constant term");
  Series b(size_t(N), 0);
  b[0] = F.inv(a[0]);
  for (int n = 1; n < N; ++n) {
    Field::El s = 0;
    for (int k = 1; k <= n; ++k) s = F.add(s, F.mul(a[size_t(k)], b[size_t(n - k)]));
    b[size_t(n)] = F.neg(F.mul(b[0], s));
  }
  return b;
}

Series entry_series(const SMat& a, int i, int j) {
  Series s(size_t(a.N));
  for (int k = 0; k < a.N; ++k) s[size_t(k)] = a.at(i, j, k);
  return s;
}

// Determinant of the submatrix on the given rows/columns, by cofactor
// expansion over the series ring (sizes <= 4).
Series minor_det(const Field& F, const SMat& a, const std::vector<int>& rows,
                 const std::vector<int>& cols) {
  int N = a.N;
  if (rows.size() == 1) return entry_series(a, rows[0], cols[0]);
  Series acc(size_t(N), 0);
  for (size_t k = 0; k < cols.size(); ++k) {
    Series e = entry_series(a, rows[0], cols[k]);
    bool zero = true;
    for (auto v : e)
      if (v) zero = false;
    if (zero) continue;
    std::vector<int> rs(rows.begin() + 1, rows.end());
    std::vector<int> cs = cols;
    cs.erase(cs.begin() + long(k));
    Series term = series_mul(F, e, minor_det(F, a, rs, cs), N);
    for (int t = 0; t < N; ++t)
      acc[size_t(t)] =
          (k % 2 == 0) ? F.add(acc[size_t(t)], term[size_t(t)]) : F.sub(acc[size_t(t)], term[size_t(t)]);
  }
  return acc;
}

} // namespace

std::vector<Field::El> smat_det(const Field& F, const SMat& a) {
  std::vector<int> rows(a.dim), cols(a.dim);
  for (int i = 0; i < a.dim; ++i) rows[size_t(i)] = cols[size_t(i)] = i;
  return minor_det(F, a, rows, cols);
}

std::vector<Field::El> series_invert(const Field& F, const std::vector<Field::El>& a) {
  return series_inv(F, a, int(a.size()));
}

SMat smat_truncate(const SMat& a, int n) {
  if (n < 1 || n > a.N) throw Error("LevelOutOfRange", "truncation must satisfy 1 <= n <= N");
  SMat out = smat_zero(a.dim, n);
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j)
      for (int k = 0; k < n; ++k) out.at(i, j, k) = a.at(i, j, k);
  return out;
}

SMat smat_inv(const Field& F, const SMat& a) {
  int dim = a.dim, N = a.N;
  Series det = smat_det(F, a);
  if (det[0] == 0) throw Error("NonInvertible", "determinant has zero constant term");
  Series dinv = series_inv(F, det, N);

  SMat out = smat_zero(dim, N);
  if (dim == 1) {
    for (int t = 0; t < N; ++t) out.at(0, 0, t) = dinv[size_t(t)];
    return out;
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      std::vector<int> rs, cs;
      for (int r = 0; r < dim; ++r)
        if (r != i) rs.push_back(r);
      for (int c2 = 0; c2 < dim; ++c2)
        if (c2 != j) cs.push_back(c2);
      Series minor = minor_det(F, a, rs, cs);
      Series cof = series_mul(F, minor, dinv, N);
      bool negate = (i + j) % 2 != 0;
      // adjugate transposes the cofactor matrix
      for (int t = 0; t < N; ++t)
        out.at(j, i, t) = negate ? F.neg(cof[size_t(t)]) : cof[size_t(t)];
    }
  }
  return out;
}

SMat smat_commutator(const Field& F, const SMat& a, const SMat& b) {
  return smat_mul(F, smat_mul(F, a, b), smat_mul(F, smat_inv(F, a), smat_inv(F, b)));
}

SMat smat_pow(const Field& F, const SMat& a, uint64_t e) {
  SMat r = smat_identity(F, a.dim, a.N);
  SMat base = a;
  while (e) {
    if (e & 1) r = smat_mul(F, r, base);
    base = smat_mul(F, base, base);
    e >>= 1;
  }
  return r;
}

SMat sigma_star(const Field& F, const SMat& g) {
  if (g.dim != 3) throw Error("BadShape", "sigma-star is defined for 3x3 matrices");
  SMat out = smat_zero(g.dim, g.N);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < g.N; ++k) {
        Field::El v = g.at(i, j, k);
        out.at(j, i, k) = (k % 2 == 0) ? v : F.neg(v); // t -> -t, then transpose
      }
  return out;
}

SMat hermitian_form_J(const Field& F, int N) {
  SMat J = smat_zero(3, N);
  J.at(0, 2, 0) = F.one();
  J.at(1, 1, 0) = F.neg(F.one());
  J.at(2, 0, 0) = F.one();
  return J;
}

bool is_unitary(const Field& F, const SMat& g) {
  SMat J = hermitian_form_J(F, g.N);
  // J^-1 = J, so the condition J^-1 g* J = g^-1 reads J g* J g = 1.
  SMat lhs = smat_mul(F, smat_mul(F, J, smat_mul(F, sigma_star(F, g), J)), g);
  return lhs == smat_identity(F, 3, g.N);
}

DegreeLC degree_lc(const Field& F, const SMat& g) {
  int dim = g.dim, N = g.N;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (g.at(i, j, 0) != (i == j ? F.one() : 0))
        throw Error("NotProUnipotent", "matrix is not congruent to 1 mod t");
  for (int k = 1; k < N; ++k) {
    bool nonzero = false;
    for (int i = 0; i < dim && !nonzero; ++i)
      for (int j = 0; j < dim && !nonzero; ++j)
        if (g.at(i, j, k) != 0) nonzero = true;
    if (nonzero) {
      DegreeLC d;
      d.degree = k;
      d.lc.resize(size_t(dim) * dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) d.lc[size_t(i * dim + j)] = g.at(i, j, k);
      return d;
    }
  }
  DegreeLC d;
  d.infinite = true;
  return d;
}

bool congruence_level(const Field& F, const SMat& g, int n) {
  if (n < 1 || n >= g.N) throw Error("LevelOutOfRange", "need 1 <= n < N");
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) {
      if (g.at(i, j, 0) != (i == j ? F.one() : 0)) return false;
      for (int k = 1; k < n; ++k)
        if (g.at(i, j, k) != 0) return false;
    }
  return true;
}

bool is_upper_unitriangular_mod_t(const Field& F, const SMat& g) {
  for (int i = 0; i < g.dim; ++i)
    for (int j = 0; j < g.dim; ++j) {
      Field::El v = g.at(i, j, 0);
      if (i == j && v != F.one()) return false;
      if (i > j && v != 0) return false;
    }
  return true;
}

std::string smat_to_string(const Field& F, const SMat& g) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < g.dim; ++i) {
    if (i) os << ", ";
    os << "[";
    for (int j = 0; j < g.dim; ++j) {
      if (j) os << ", ";
      os << "[";
      for (int k = 0; k < g.N; ++k) {
        if (k) os << ",";
        os << F.to_string(g.at(i, j, k));
      }
      os << "]";
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

void smat_key_check(const Field& F, int dim, int N) {
  check_shape(dim, N);
  unsigned __int128 cap = 1;
  int digits = dim * dim * N;
  for (int i = 0; i < digits; ++i) {
    if (cap > ((unsigned __int128)1 << 120)) throw Error("KeyOverflow", "element encoding exceeds 128 bits");
    cap *= F.q();
  }
}

SMatKey smat_pack(const Field& F, const SMat& a) {
  unsigned __int128 acc = 0;
  int digits = a.dim * a.dim * a.N;
  for (int i = 0; i < digits; ++i) acc = acc * F.q() + a.c[size_t(i)];
  SMatKey k;
  k.hi = uint64_t(acc >> 64);
  k.lo = uint64_t(acc);
  return k;
}

SMat smat_unpack(const Field& F, int dim, int N, const SMatKey& key) {
  SMat m = smat_zero(dim, N);
  unsigned __int128 acc = ((unsigned __int128)key.hi << 64) | key.lo;
  int digits = dim * dim * N;
  for (int i = digits - 1; i >= 0; --i) {
    m.c[size_t(i)] = Field::El(acc % F.q());
    acc /= F.q();
  }
  return m;
}

} // namespace kmf
