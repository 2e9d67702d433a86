#include "kmf/ffield.hpp"

#include <algorithm>

namespace kmf {

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t n) {
  return uint64_t((unsigned __int128)a * b % n);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t n) {
  uint64_t r = 1;
  a %= n;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, n);
    a = mulmod_u64(a, a, n);
    e >>= 1;
  }
  return r;
}

// Little-endian polynomial helpers over F_p, used only to build the tables.
using Poly = std::vector<uint64_t>;

Poly poly_trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b, uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  return poly_trim(c);
}

// Remainder modulo a monic divisor.
Poly poly_rem(Poly a, const Poly& d, uint64_t p) {
  a = poly_trim(a);
  size_t dd = d.size() - 1;
  while (a.size() > dd) {
    uint64_t lead = a.back();
    size_t shift = a.size() - 1 - dd;
    for (size_t i = 0; i <= dd; ++i) {
      uint64_t t = (lead * d[i]) % p;
      a[shift + i] = (a[shift + i] + p - t) % p;
    }
    a = poly_trim(a);
  }
  return a;
}

uint64_t poly_eval(const Poly& a, uint64_t x, uint64_t p) {
  uint64_t r = 0;
  for (size_t i = a.size(); i-- > 0;) r = (r * x + a[i]) % p;
  return r;
}

bool poly_divides(const Poly& d, const Poly& a, uint64_t p) {
  return poly_rem(a, d, p).empty();
}

// Exhaustive irreducibility check, enough for modulus degrees <= 4: a poly of
// degree 2 or 3 is irreducible iff it has no roots; degree 4 additionally
// needs no monic irreducible quadratic factor.
bool poly_irreducible(const Poly& f, uint64_t p) {
  size_t deg = f.size() - 1;
  if (deg > 4) throw Error("FieldTooLarge", "modulus degree > 4 not supported");
  for (uint64_t x = 0; x < p; ++x)
    if (poly_eval(f, x, p) == 0) return false;
  if (deg <= 3) return true;
  for (uint64_t c1 = 0; c1 < p; ++c1) {
    for (uint64_t c0 = 0; c0 < p; ++c0) {
      Poly quad = {c0, c1, 1};
      bool has_root = false;
      for (uint64_t x = 0; x < p && !has_root; ++x)
        if (poly_eval(quad, x, p) == 0) has_root = true;
      if (!has_root && poly_divides(quad, f, p)) return false;
    }
  }
  return true;
}

Poly default_modulus(uint64_t p, unsigned m) {
  uint64_t q = 1;
  for (unsigned i = 0; i < m; ++i) q *= p;
  switch (q) {
    case 4: return {1, 1, 1};        // x^2 + x + 1
    case 8: return {1, 1, 0, 1};     // x^3 + x + 1
    case 9: return {1, 0, 1};        // x^2 + 1
    case 16: return {1, 1, 0, 0, 1}; // x^4 + x + 1
    case 25: return {2, 0, 1};       // x^2 + 2
    case 27: return {1, 2, 0, 1};    // x^3 + 2x + 1
    default: break;
  }
  // Lexicographically smallest monic irreducible of degree m.
  Poly f(m + 1, 0);
  f[m] = 1;
  uint64_t count = 1;
  for (unsigned i = 0; i < m; ++i) count *= p;
  for (uint64_t code = 0; code < count; ++code) {
    uint64_t c = code;
    for (unsigned i = 0; i < m; ++i) {
      f[m - 1 - i] = c % p;
      c /= p;
    }
    if (poly_irreducible(f, p)) return f;
  }
  throw Error("FieldTooLarge", "no irreducible modulus found"); // unreachable
}

} // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t s : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % s == 0) return n == s;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) d >>= 1, ++r;
  // Deterministic Miller-Rabin base set for n < 2^64.
  for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

FieldSpec FieldSpec::prime(uint64_t p) {
  FieldSpec s;
  s.p = p;
  s.m = 1;
  s.modulus = {0, 1};
  return s;
}

FieldSpec FieldSpec::extension(uint64_t p, unsigned m) {
  if (m == 1) return prime(p);
  FieldSpec s;
  s.p = p;
  s.m = m;
  s.modulus = default_modulus(p, m);
  return s;
}

FieldSpec FieldSpec::extension(uint64_t p, std::vector<uint64_t> modulus) {
  FieldSpec s;
  s.p = p;
  s.m = modulus.size() < 2 ? 0 : unsigned(modulus.size() - 1);
  s.modulus = std::move(modulus);
  return s;
}

FieldSpec FieldSpec::from_q(uint64_t q) {
  if (q < 2) throw Error("BadFieldSize", "q must be >= 2");
  for (uint64_t p = 2; p * p <= q; ++p) {
    if (q % p == 0) {
      unsigned m = 0;
      uint64_t r = q;
      while (r % p == 0) r /= p, ++m;
      if (r != 1) throw Error("BadFieldSize", std::to_string(q) + " is not a prime power");
      return extension(p, m);
    }
  }
  return prime(q);
}

Field::Field(const FieldSpec& spec) : spec_(spec), p_(spec.p), m_(spec.m) {
  if (!is_prime_u64(p_)) throw Error("NotPrime", std::to_string(p_) + " is not prime");
  if (m_ < 1) throw Error("BadModulus", "extension degree must be >= 1");
  if (spec_.modulus.size() != m_ + 1 || spec_.modulus.back() % p_ != 1)
    throw Error("BadModulus", "modulus must be monic of degree m");
  for (auto& c : spec_.modulus) c %= p_;
  if (m_ > 1 && !poly_irreducible(spec_.modulus, p_))
    throw Error("BadModulus", "modulus is reducible over F_p");

  q_ = 1;
  for (unsigned i = 0; i < m_; ++i) {
    q_ *= p_;
    if (q_ > 512) throw Error("FieldTooLarge", "q > 512 unsupported (desk-scale fields only)");
  }

  // code <-> coefficient tuple, c_0 is the most significant base-p digit
  auto decode2 = [&](uint64_t code) {
    Poly c(m_, 0);
    for (unsigned i = 0; i < m_; ++i) {
      c[m_ - 1 - i] = code % p_;
      code /= p_;
    }
    return c;
  };
  auto encode = [&](const Poly& c) {
    uint64_t code = 0;
    for (unsigned i = 0; i < m_; ++i) code = code * p_ + (i < c.size() ? c[i] : 0);
    return El(code);
  };

  one_ = encode(Poly{1});
  add_.assign(q_ * q_, 0);
  mul_.assign(q_ * q_, 0);
  neg_.assign(q_, 0);
  inv_.assign(q_, 0);

  std::vector<Poly> reps(q_);
  for (uint64_t a = 0; a < q_; ++a) reps[a] = decode2(a);
  for (uint64_t a = 0; a < q_; ++a) {
    Poly na(m_);
    for (unsigned i = 0; i < m_; ++i) na[i] = (p_ - reps[a][i]) % p_;
    neg_[a] = encode(na);
    for (uint64_t b = 0; b < q_; ++b) {
      Poly s(m_);
      for (unsigned i = 0; i < m_; ++i) s[i] = (reps[a][i] + reps[b][i]) % p_;
      add_[idx(El(a), El(b))] = encode(s);
      Poly prod = poly_rem(poly_mul(poly_trim(reps[a]), poly_trim(reps[b]), p_), spec_.modulus, p_);
      mul_[idx(El(a), El(b))] = encode(prod);
    }
  }
  // Inverses by exhaustive pairing; q is small.
  for (uint64_t a = 1; a < q_; ++a) {
    for (uint64_t b = 1; b < q_; ++b) {
      if (mul_[idx(El(a), El(b))] == one_) {
        inv_[a] = El(b);
        break;
      }
    }
    if (inv_[a] == 0) throw Error("BadModulus", "non-invertible nonzero element; modulus not irreducible");
  }
}

Field::El Field::pow(El a, long long e) const {
  if (e < 0) return pow(inv(a), -e);
  El r = one_;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

Field::El Field::from_int(long long v) const {
  long long r = v % (long long)p_;
  if (r < 0) r += p_;
  // constant polynomial: c_0 = r, most significant digit
  uint64_t code = uint64_t(r);
  for (unsigned i = 1; i < m_; ++i) code *= p_;
  return El(code);
}

std::vector<Field::El> Field::elements(uint64_t cap) const {
  if (q_ > cap)
    throw Error("FieldTooLarge", "enumeration of F_" + std::to_string(q_) + " exceeds cap " + std::to_string(cap));
  std::vector<El> out(q_);
  for (uint64_t a = 0; a < q_; ++a) out[a] = El(a);
  return out;
}

std::vector<Field::El> Field::nonzero_elements(uint64_t cap) const {
  auto v = elements(cap);
  v.erase(v.begin());
  return v;
}

std::vector<Field::El> Field::basis_elements() const {
  // x^i has coefficient tuple e_i, i.e. code p^(m-1-i) under the big-endian packing
  std::vector<El> out;
  uint64_t code = 1;
  std::vector<uint64_t> codes;
  for (unsigned i = 0; i < m_; ++i) {
    codes.push_back(code);
    code *= p_;
  }
  for (unsigned i = 0; i < m_; ++i) out.push_back(El(codes[m_ - 1 - i]));
  return out;
}

std::vector<unsigned> Field::coeffs(El a) const {
  std::vector<unsigned> c(m_, 0);
  uint64_t code = a;
  for (unsigned i = 0; i < m_; ++i) {
    c[m_ - 1 - i] = unsigned(code % p_);
    code /= p_;
  }
  return c;
}

std::string Field::to_string(El a) const {
  auto c = coeffs(a);
  if (m_ == 1) return std::to_string(c[0]);
  std::string s = "(";
  for (unsigned i = 0; i < m_; ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + ")";
}

uint64_t Field::mult_order(El a) const {
  if (a == 0) throw Error("DivisionByZero", "order of 0 undefined");
  uint64_t ord = 1;
  El x = a;
  while (x != one_) {
    x = mul(x, a);
    ++ord;
  }
  return ord;
}

bool Field::gate_ok(Gate g) const {
  switch (g) {
    case Gate::QGt3: return q_ > 3;
    case Gate::PGt2: return p_ > 2;
    case Gate::Both: return q_ > 3 && p_ > 2;
  }
  return false;
}

void Field::require_gate(Gate g, const std::string& context) const {
  if (gate_ok(g)) return;
  std::string req = g == Gate::QGt3 ? "|k| > 3" : g == Gate::PGt2 ? "p > 2" : "|k| > 3 and p > 2";
  throw Error("GateFailed", context + " requires " + req + " (q = " + std::to_string(q_) +
                                ", p = " + std::to_string(p_) + ")");
}

} // namespace kmf
