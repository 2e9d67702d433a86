#include "kmf/rank2.hpp"

#include <algorithm>
#include <map>

namespace kmf {

std::string to_string(RCase c) {
  switch (c) {
    case RCase::NonTwisted: return "case1";
    case RCase::Twisted: return "case2";
    case RCase::FiniteA2: return "a2";
  }
  return "?";
}

RCase rcase_from_string(const std::string& s) {
  if (s == "case1") return RCase::NonTwisted;
  if (s == "case2") return RCase::Twisted;
  if (s == "a2") return RCase::FiniteA2;
  throw Error("UsageError", "unknown case '" + s + "' (expected case1 | case2 | a2)");
}

Gcm case_gcm(RCase c) {
  switch (c) {
    case RCase::NonTwisted: return validate_gcm({{2, -2}, {-2, 2}}, "case1");
    case RCase::Twisted: return validate_gcm({{2, -4}, {-1, 2}}, "case2");
    case RCase::FiniteA2: return validate_gcm({{2, -1}, {-1, 2}}, "a2");
  }
  throw Error("UsageError", "bad case");
}

Realization::Realization(RCase rcase, const Field& F, int N)
    : rcase_(rcase), F_(&F), N_(N), A_(case_gcm(rcase)) {
  if (N < 1 || N > kMaxTrunc) throw Error("BadShape", "truncation level must be 1..16");
  if (rcase_ == RCase::FiniteA2) {
    F.require_gate(Gate::QGt3, "finite-type rank-2 realization");
    half_ = quarter_ = 0;
  } else {
    F.require_gate(Gate::Both, "affine rank-2 realization");
    half_ = F.inv(F.from_int(2));
    quarter_ = F.inv(F.from_int(4));
  }
}

std::optional<Realization::TableEntry> Realization::lookup(const RootVec& gamma) const {
  if (gamma.size() != 2 || !is_positive_root_vec(gamma)) return std::nullopt;
  const Field& F = *F_;
  int64_t x = gamma[0], y = gamma[1];
  auto unit = [&](int i, int j, Field::El s) {
    SMat e = smat_zero(dim(), N_);
    e.at(i, j, 0) = s;
    return e;
  };
  Field::El one = F.one();
  Field::El two = F.from_int(2);
  switch (rcase_) {
    case RCase::FiniteA2: {
      if (x == 1 && y == 0) return TableEntry{unit(0, 1, one), 0};
      if (x == 0 && y == 1) return TableEntry{unit(1, 2, one), 0};
      if (x == 1 && y == 1) return TableEntry{unit(0, 2, one), 0};
      return std::nullopt;
    }
    case RCase::NonTwisted: {
      if (x == y + 1) return TableEntry{unit(0, 1, one), int(y)};
      if (y == x + 1) return TableEntry{unit(1, 0, one), int(y)};
      return std::nullopt;
    }
    case RCase::Twisted: {
      auto two_mat = [&](int i1, int j1, int i2, int j2, bool minus, Field::El s) {
        SMat e = smat_zero(3, N_);
        e.at(i1, j1, 0) = s;
        e.at(i2, j2, 0) = minus ? F.neg(s) : s;
        return e;
      };
      if (x == 2 * y + 1) { // alpha_1 + y*delta
        if (y % 2 == 0) return TableEntry{two_mat(0, 1, 1, 2, false, one), int(y)};
        return TableEntry{two_mat(0, 1, 1, 2, true, two), int(y)};
      }
      if (y >= 1 && x == 2 * y - 1) { // -alpha_1 + y*delta
        if (y % 2 == 0) return TableEntry{two_mat(1, 0, 2, 1, false, two), int(y)};
        return TableEntry{two_mat(1, 0, 2, 1, true, one), int(y)};
      }
      if (y % 2 == 1 && x == 2 * y + 2) return TableEntry{unit(0, 2, one), int(y)}; // 2a1 + y*delta
      if (y % 2 == 1 && x == 2 * y - 2) return TableEntry{unit(2, 0, one), int(y)}; // -2a1 + y*delta
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool Realization::realizes(const RootVec& gamma) const { return lookup(gamma).has_value(); }

int Realization::t_degree(const RootVec& gamma) const {
  auto e = lookup(gamma);
  if (!e) throw Error("NotAPositiveRealRoot", vec_to_string(gamma) + " is not a realized positive root");
  return e->tdeg;
}

SMat Realization::chi(const RootVec& gamma, Field::El u) const {
  auto te = lookup(gamma);
  if (!te) throw Error("NotAPositiveRealRoot", vec_to_string(gamma) + " is not a realized positive root");
  const Field& F = *F_;
  SMat out = smat_identity(F, dim(), N_);
  // 1 + u e t^d + (u e t^d)^2 / 2; the square term vanishes in the 2x2 and
  // finite A2 tables and needs p > 2 in the twisted case.
  const SMat& e = te->e;
  int d = te->tdeg;
  if (d < N_) {
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j)
        out.at(i, j, d) = F.add(out.at(i, j, d), F.mul(u, e.at(i, j, 0)));
  }
  if (rcase_ == RCase::Twisted && 2 * d < N_) {
    SMat e2 = smat_mul(F, e, e);
    Field::El s = F.mul(F.mul(u, u), half_);
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j)
        out.at(i, j, 2 * d) = F.add(out.at(i, j, 2 * d), F.mul(s, e2.at(i, j, 0)));
  }
  return out;
}

SMat Realization::h_elem(int n, Field::El u) const {
  const Field& F = *F_;
  if (rcase_ == RCase::FiniteA2)
    throw Error("LevelOutOfRange", "h_n is defined for the affine realizations only");
  if (n < 1 || n >= N_ - 1) throw Error("LevelOutOfRange", "h_n needs 1 <= n < N-1");
  if (rcase_ == RCase::NonTwisted) {
    std::vector<Field::El> diag(size_t(N_), 0);
    diag[0] = F.one();
    diag[size_t(n)] = u;
    auto inv = series_invert(F, diag);
    SMat out = smat_zero(2, N_);
    for (int k = 0; k < N_; ++k) {
      out.at(0, 0, k) = diag[size_t(k)];
      out.at(1, 1, k) = inv[size_t(k)];
    }
    return out;
  }
  // twisted: h_n(u) = [e_0^(1)(u), f_n^(1)(1)]
  SMat a = chi(RootVec{1, 0}, u);
  SMat b = chi(RootVec{2 * int64_t(n) - 1, int64_t(n)}, F.one());
  return smat_commutator(F, a, b);
}

SMat Realization::torus(size_t i, Field::El u) const {
  const Field& F = *F_;
  if (u == 0) throw Error("DivisionByZero", "torus parameter must be a unit");
  if (i < 1 || i > 2) throw Error("IndexOutOfRange", "torus index must be 1 or 2");
  Field::El ui = F.inv(u);
  SMat out = smat_identity(F, dim(), N_);
  switch (rcase_) {
    case RCase::NonTwisted:
      out.at(0, 0, 0) = i == 1 ? u : ui;
      out.at(1, 1, 0) = i == 1 ? ui : u;
      break;
    case RCase::Twisted:
      if (i == 1) {
        out.at(0, 0, 0) = F.mul(u, u);
        out.at(2, 2, 0) = F.mul(ui, ui);
      } else {
        out.at(0, 0, 0) = ui;
        out.at(2, 2, 0) = u;
      }
      break;
    case RCase::FiniteA2:
      if (i == 1) {
        out.at(0, 0, 0) = u;
        out.at(1, 1, 0) = ui;
      } else {
        out.at(1, 1, 0) = u;
        out.at(2, 2, 0) = ui;
      }
      break;
  }
  return out;
}

bool Realization::in_group(const SMat& g) const {
  const Field& F = *F_;
  if (g.dim != dim() || g.N != N_) return false;
  if (!is_upper_unitriangular_mod_t(F, g)) return false;
  auto det = smat_det(F, g);
  if (det[0] != F.one()) return false;
  for (size_t k = 1; k < det.size(); ++k)
    if (det[k] != 0) return false;
  if (rcase_ == RCase::Twisted && !is_unitary(F, g)) return false;
  if (rcase_ == RCase::FiniteA2) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 1; k < N_; ++k)
          if (g.at(i, j, k) != 0) return false;
  }
  return true;
}

bool Realization::filtration_member(const SMat& g, int n) const {
  const Field& F = *F_;
  if (rcase_ == RCase::FiniteA2) throw Error("LevelOutOfRange", "no filtration in the finite case");
  if (n < 1 || n >= N_) throw Error("LevelOutOfRange", "filtration level needs 1 <= n < N");
  if (!in_group(g)) throw Error("NotInGroup", "element fails the realization's group predicates");
  if (n >= 2) return congruence_level(F, g, n);
  if (!congruence_level(F, g, 1)) return false;
  if (rcase_ == RCase::NonTwisted) {
    // g in P_2 E_1: the t-coefficient lies on the E_12 line
    return g.at(0, 0, 1) == 0 && g.at(1, 0, 1) == 0 && g.at(1, 1, 1) == 0;
  }
  // twisted: the (3,1) entry lies in t^2 k[[t]]
  return g.at(2, 0, 1) == 0;
}

std::vector<RootVec> Realization::generator_roots() const {
  std::vector<RootVec> out;
  if (rcase_ == RCase::FiniteA2) {
    out = {{1, 0}, {0, 1}, {1, 1}};
  } else if (rcase_ == RCase::NonTwisted) {
    for (int64_t d = 0; d < N_; ++d) {
      out.push_back({d + 1, d});
      if (d >= 1) out.push_back({d - 1, d});
    }
  } else {
    for (int64_t d = 0; d < N_; ++d) {
      out.push_back({2 * d + 1, d});
      if (d >= 1) out.push_back({2 * d - 1, d});
      if (d % 2 == 1) {
        out.push_back({2 * d + 2, d});
        out.push_back({2 * d - 2, d});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const RootVec& a, const RootVec& b) {
    int64_t ha = height(a), hb = height(b);
    if (ha != hb) return ha < hb;
    return a < b;
  });
  return out;
}

std::vector<SMat> Realization::z_family(int n) const {
  const Field& F = *F_;
  if (n < 1 || n >= N_ - 1) throw Error("LevelOutOfRange", "Z_n needs 1 <= n < N-1");
  std::vector<SMat> out;
  auto add_chi = [&](int64_t x, int64_t y) {
    for (auto u : F.nonzero_elements()) out.push_back(chi(RootVec{x, y}, u));
  };
  if (rcase_ == RCase::NonTwisted) {
    add_chi(n + 1, n);
    if (n >= 2) {
      add_chi(n - 1, n);
      for (auto u : F.nonzero_elements()) out.push_back(h_elem(n, u));
    }
    return out;
  }
  if (rcase_ == RCase::Twisted) {
    if (n == 1) {
      add_chi(4, 1);                                                    // E_1^(2)
      add_chi(3, 1);                                                    // E_1^(1)
      for (auto u : F.nonzero_elements()) out.push_back(h_elem(1, u)); // H_1
      add_chi(1, 1);                                                    // F_1^(1)
      return out;
    }
    add_chi(2 * int64_t(n) + 1, n);
    add_chi(2 * int64_t(n) - 1, n);
    for (auto u : F.nonzero_elements()) out.push_back(h_elem(n, u));
    if (n % 2 == 1) {
      add_chi(2 * int64_t(n) + 2, n);
      add_chi(2 * int64_t(n) - 2, n);
    }
    return out;
  }
  throw Error("LevelOutOfRange", "no Z_n families in the finite case");
}

FqMat ln_basis(const Field& F, int n) {
  if (n < 1) throw Error("LevelOutOfRange", "L_n needs n >= 1");
  F.require_gate(Gate::PGt2, "twisted level space");
  // Solve X^t J = eps J X with eps = (-1)^(n+1), tr X = 0, and X_31 = 0 at n = 1.
  // J indices (0-based): J_02 = 1, J_11 = -1, J_20 = 1.
  bool plus = (n % 2 == 1);
  Field::El eps = plus ? F.one() : F.neg(F.one());
  auto J = [&](int a, int b) -> Field::El {
    if (a == 0 && b == 2) return F.one();
    if (a == 1 && b == 1) return F.neg(F.one());
    if (a == 2 && b == 0) return F.one();
    return 0;
  };
  FqMat eqs;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      FqVec row(9, 0);
      // (X^t J)_{ab} = sum_c X_{ca} J_{cb};  (J X)_{ab} = sum_c J_{ac} X_{cb}
      for (int c = 0; c < 3; ++c) {
        row[size_t(c * 3 + a)] = F.add(row[size_t(c * 3 + a)], J(c, b));
        row[size_t(c * 3 + b)] = F.sub(row[size_t(c * 3 + b)], F.mul(eps, J(a, c)));
      }
      eqs.push_back(std::move(row));
    }
  }
  FqVec tr(9, 0);
  tr[0] = tr[4] = tr[8] = F.one();
  eqs.push_back(tr);
  if (n == 1) {
    FqVec bot(9, 0);
    bot[6] = F.one(); // X_31
    eqs.push_back(bot);
  }
  return fq_nullspace(F, eqs);
}

FqMat nontwisted_level_basis(const Field& F, int n) {
  if (n < 1) throw Error("LevelOutOfRange", "level space needs n >= 1");
  Field::El one = F.one();
  if (n == 1) return {FqVec{0, one, 0, 0}};
  return {FqVec{0, one, 0, 0}, FqVec{0, 0, one, 0}, FqVec{one, 0, 0, F.neg(one)}};
}

namespace {

std::string el_str(const Field& F, Field::El v) { return F.to_string(v); }

FqVec lc_as_vec(const DegreeLC& d) { return d.lc; }

} // namespace

CheckReport span_check(RCase c, const Field& F, int n) {
  CheckReport rep;
  rep.check = "span";
  rep.case_name = to_string(c);
  rep.params = {{"n", std::to_string(n)}, {"q", std::to_string(F.q())}};
  if (c == RCase::FiniteA2) throw Error("UsageError", "span check applies to the affine cases");
  Realization real(c, F, n + 2);

  FqMat expected = (c == RCase::Twisted) ? ln_basis(F, n) : nontwisted_level_basis(F, n);
  FqMat lcs;
  bool ok = true;
  for (auto& g : real.z_family(n)) {
    auto dl = degree_lc(F, g);
    if (dl.infinite || dl.degree != n) {
      ok = false;
      rep.witnesses.push_back("generator of Z_" + std::to_string(n) + " has degree " +
                              (dl.infinite ? std::string("infinite") : std::to_string(dl.degree)));
      continue;
    }
    lcs.push_back(lc_as_vec(dl));
  }
  size_t rank = fq_rank(F, lcs);
  size_t dim = expected.size();
  rep.params.push_back({"rank", std::to_string(rank)});
  rep.params.push_back({"expected_dim", std::to_string(dim)});
  if (rank != dim || !fq_same_span(F, lcs, expected)) {
    ok = false;
    rep.witnesses.push_back("SpanDeficient: leading coefficients span rank " + std::to_string(rank) +
                            ", level space has dimension " + std::to_string(dim));
  }
  rep.pass = ok;
  return rep;
}

std::vector<std::string> congruence_identity_names(RCase c) {
  if (c == RCase::NonTwisted) return {"e-step", "f-step", "h-step"};
  if (c == RCase::Twisted) return {"e1-even", "e1-odd", "f1-even", "f1-odd", "e2-odd", "f2-odd"};
  return {};
}

bool congruence_identity_level_ok(const std::string& id, int n) {
  if (id == "e-step") return n >= 1;
  if (id == "f-step" || id == "h-step") return n >= 2;
  if (id == "e1-even" || id == "f1-even") return n >= 2 && n % 2 == 0;
  if (id == "e1-odd" || id == "f1-odd" || id == "f2-odd") return n >= 3 && n % 2 == 1;
  if (id == "e2-odd") return n >= 1 && n % 2 == 1;
  throw Error("UsageError", "unknown congruence identity '" + id + "'");
}

CheckReport congruence_identity_check(RCase c, const Field& F, const std::string& id, int n) {
  CheckReport rep;
  rep.check = "congruence:" + id;
  rep.case_name = to_string(c);
  rep.params = {{"n", std::to_string(n)}, {"q", std::to_string(F.q())}, {"N", std::to_string(n + 2)}};
  if (!congruence_identity_level_ok(id, n))
    throw Error("LevelOutOfRange", "identity '" + id + "' is not defined at level " + std::to_string(n));
  Realization real(c, F, n + 2);
  Field::El one = F.one();
  Field::El half = F.inv(F.from_int(2));
  Field::El quarter = F.inv(F.from_int(4));
  int64_t m = n;

  rep.pass = true;
  for (auto u : F.elements()) {
    SMat lhs = smat_identity(F, real.dim(), real.trunc());
    SMat rhs = lhs;
    if (id == "e-step") {
      lhs = real.chi({m + 1, m}, u);
      rhs = smat_commutator(F, real.h_elem(1, one), real.chi({m, m - 1}, F.mul(u, half)));
    } else if (id == "f-step") {
      lhs = real.chi({m - 1, m}, u);
      rhs = smat_commutator(F, real.h_elem(1, one), real.chi({m - 2, m - 1}, F.neg(F.mul(u, half))));
    } else if (id == "h-step") {
      lhs = real.h_elem(int(m), u);
      rhs = smat_commutator(F, real.chi({2, 1}, one), real.chi({m - 2, m - 1}, u));
    } else if (id == "e1-even") {
      lhs = real.chi({2 * m + 1, m}, u);
      rhs = smat_commutator(F, real.chi({4, 1}, one), real.chi({2 * m - 3, m - 1}, F.neg(u)));
    } else if (id == "e1-odd") {
      lhs = real.chi({2 * m + 1, m}, u);
      rhs = smat_commutator(F, real.chi({4, 1}, one), real.chi({2 * m - 3, m - 1}, u));
    } else if (id == "f1-even") {
      lhs = real.chi({2 * m - 1, m}, u);
      rhs = smat_commutator(F, real.chi({0, 1}, one), real.chi({2 * m - 1, m - 1}, u));
    } else if (id == "f1-odd") {
      lhs = real.chi({2 * m - 1, m}, u);
      rhs = smat_commutator(F, real.chi({0, 1}, one), real.chi({2 * m - 1, m - 1}, F.neg(u)));
    } else if (id == "e2-odd") {
      lhs = real.chi({2 * m + 2, m}, u);
      rhs = smat_commutator(F, real.chi({1, 0}, one), real.chi({2 * m + 1, m}, F.neg(F.mul(u, quarter))));
    } else if (id == "f2-odd") {
      lhs = real.chi({2 * m - 2, m}, u);
      rhs = smat_commutator(F, real.chi({1, 1}, one), real.chi({2 * m - 3, m - 1}, F.neg(F.mul(u, quarter))));
    }
    SMat quot = smat_mul(F, smat_inv(F, lhs), rhs);
    if (!congruence_level(F, quot, n + 1)) {
      rep.pass = false;
      rep.witnesses.push_back("IdentityFails(" + id + ", n=" + std::to_string(n) + ", u=" + el_str(F, u) +
                              "): residual " + smat_to_string(F, quot));
    }
  }
  return rep;
}

CheckReport relation_r1_check(const Realization& real, const RootVec& gamma) {
  const Field& F = real.field();
  CheckReport rep;
  rep.check = "relation:R1";
  rep.case_name = to_string(real.rcase());
  rep.params = {{"root", vec_to_string(gamma)}, {"q", std::to_string(F.q())}};
  rep.pass = true;
  for (auto u : F.elements()) {
    for (auto v : F.elements()) {
      SMat lhs = real.chi(gamma, F.add(u, v));
      SMat rhs = smat_mul(F, real.chi(gamma, u), real.chi(gamma, v));
      if (!(lhs == rhs)) {
        rep.pass = false;
        rep.witnesses.push_back("R1 fails at u=" + el_str(F, u) + ", v=" + el_str(F, v));
      }
    }
  }
  return rep;
}

namespace {

int64_t lift_to_int(const Field& F, Field::El v) {
  auto c = F.coeffs(v);
  for (size_t i = 1; i < c.size(); ++i)
    if (c[i] != 0) throw Error("RelationFails", "structure constant is not in the prime subfield");
  int64_t x = int64_t(c[0]);
  if (x > int64_t(F.p()) / 2) x -= int64_t(F.p());
  return x;
}

// Lowest k with a nonzero coefficient matrix of g - 1 (k = 0 allowed), or -1.
int lowest_nonunit_coeff(const Field& F, const SMat& g) {
  for (int k = 0; k < g.N; ++k) {
    for (int i = 0; i < g.dim; ++i)
      for (int j = 0; j < g.dim; ++j) {
        Field::El expect = (k == 0 && i == j) ? F.one() : 0;
        if (g.at(i, j, k) != expect) return k;
      }
  }
  return -1;
}

} // namespace

R2Result relation_r2_check(const Realization& real, const RootDatum& datum, const RootVec& a,
                           const RootVec& b, int64_t bound) {
  const Field& F = real.field();
  R2Result res;
  auto& rep = res.report;
  rep.check = "relation:R2";
  rep.case_name = to_string(real.rcase());
  rep.params = {{"alpha", vec_to_string(a)}, {"beta", vec_to_string(b)}, {"q", std::to_string(F.q())}};
  if (!is_prenilpotent(datum, a, b))
    throw Error("NotPrenilpotent", "(" + vec_to_string(a) + ", " + vec_to_string(b) + ") is not prenilpotent");
  if (!real.realizes(a) || !real.realizes(b))
    throw Error("NotAPositiveRealRoot", "R2 check needs realized positive roots");

  auto cone = cone_roots(datum, a, b, bound);
  // Fixed product order: height, then lexicographic on (m, n).
  std::sort(cone.begin(), cone.end(), [](const ConeRoot& x, const ConeRoot& y) {
    int64_t hx = height(x.root), hy = height(y.root);
    if (hx != hy) return hx < hy;
    return std::pair(x.m, x.n) < std::pair(y.m, y.n);
  });

  int need = 2;
  for (auto& cr : cone) need = std::max(need, real.t_degree(cr.root) + 2);
  need = std::max(need, real.t_degree(a) + real.t_degree(b) + 2);
  if (need > kMaxTrunc)
    throw Error("LevelOutOfRange", "cone roots demand truncation beyond the supported maximum");
  Realization work(real.rcase(), F, need);

  // Solve the constants at (u, v) = (1, 1), then confirm c = C u^m v^n for all u, v.
  auto solve_at = [&](Field::El u, Field::El v) -> std::optional<std::vector<Field::El>> {
    SMat R = smat_commutator(F, work.chi(a, u), work.chi(b, v));
    std::vector<Field::El> coef(cone.size(), 0);
    std::vector<bool> done(cone.size(), false);
    for (;;) {
      int k = lowest_nonunit_coeff(F, R);
      if (k < 0) break;
      std::vector<size_t> at_k;
      for (size_t i = 0; i < cone.size(); ++i)
        if (!done[i] && work.t_degree(cone[i].root) == k) at_k.push_back(i);
      if (at_k.empty()) return std::nullopt;
      if (k == 0 && at_k.size() > 1) return std::nullopt; // ungraded constants: single-root cones only
      // solve sum c_i E_i = coeff_k(R - 1)
      int d = work.dim();
      FqMat cols;
      for (size_t i : at_k) {
        auto te = work.chi(cone[i].root, F.one());
        FqVec col(size_t(d) * d, 0);
        for (int r = 0; r < d; ++r)
          for (int cc = 0; cc < d; ++cc) {
            Field::El base = (k == 0 && r == cc) ? F.one() : 0;
            col[size_t(r * d + cc)] = F.sub(te.at(r, cc, k), base);
          }
        cols.push_back(col);
      }
      FqVec rhs(size_t(d) * d, 0);
      for (int r = 0; r < d; ++r)
        for (int cc = 0; cc < d; ++cc) {
          Field::El base = (k == 0 && r == cc) ? F.one() : 0;
          rhs[size_t(r * d + cc)] = F.sub(R.at(r, cc, k), base);
        }
      // transpose cols into the equation matrix
      FqMat eq(rhs.size(), FqVec(at_k.size(), 0));
      for (size_t ci = 0; ci < cols.size(); ++ci)
        for (size_t ri = 0; ri < rhs.size(); ++ri) eq[ri][ci] = cols[ci][ri];
      auto sol = fq_solve(F, eq, rhs);
      if (!sol) return std::nullopt;
      SMat peel = smat_identity(F, work.dim(), work.trunc());
      for (size_t idx = 0; idx < at_k.size(); ++idx) {
        coef[at_k[idx]] = (*sol)[idx];
        done[at_k[idx]] = true;
        peel = smat_mul(F, peel, work.chi(cone[at_k[idx]].root, (*sol)[idx]));
      }
      R = smat_mul(F, smat_inv(F, peel), R);
      if (lowest_nonunit_coeff(F, R) == k) return std::nullopt; // no progress
    }
    return coef;
  };

  auto base = solve_at(F.one(), F.one());
  if (!base) {
    rep.pass = false;
    rep.witnesses.push_back("RelationFails: commutator is not an ordered product over the cone roots");
    return res;
  }
  for (size_t i = 0; i < cone.size(); ++i) {
    R2Constant c;
    c.m = cone[i].m;
    c.n = cone[i].n;
    c.root = cone[i].root;
    c.value = (*base)[i];
    c.lifted = lift_to_int(F, c.value);
    res.constants.push_back(c);
  }

  rep.pass = true;
  for (auto u : F.nonzero_elements()) {
    for (auto v : F.nonzero_elements()) {
      SMat lhs = smat_commutator(F, work.chi(a, u), work.chi(b, v));
      SMat prod = smat_identity(F, work.dim(), work.trunc());
      for (auto& c : res.constants) {
        Field::El val = F.mul(c.value, F.mul(F.pow(u, c.m), F.pow(v, c.n)));
        prod = smat_mul(F, prod, work.chi(c.root, val));
      }
      if (!(lhs == prod)) {
        rep.pass = false;
        rep.witnesses.push_back("RelationFails(u=" + el_str(F, u) + ", v=" + el_str(F, v) +
                                "): ordered product with fitted constants mismatches the commutator");
      }
    }
  }
  for (auto& c : res.constants)
    rep.witnesses.push_back("C(" + std::to_string(c.m) + "," + std::to_string(c.n) + ";" +
                            vec_to_string(c.root) + ") = " + std::to_string(c.lifted));
  return res;
}

CheckReport relation_r4_check(const Realization& real, const RootVec& gamma, size_t i) {
  const Field& F = real.field();
  CheckReport rep;
  rep.check = "relation:R4";
  rep.case_name = to_string(real.rcase());
  rep.params = {{"root", vec_to_string(gamma)}, {"i", std::to_string(i)}, {"q", std::to_string(F.q())}};
  const Gcm& A = real.cartan();
  int64_t pair = 0; // <gamma, alpha_i^vee> = sum_j gamma_j a_ij
  for (size_t j = 0; j < A.rank(); ++j) pair += gamma[j] * A(i - 1, j);
  rep.params.push_back({"pairing", std::to_string(pair)});
  rep.pass = true;
  for (auto u : F.nonzero_elements()) {
    SMat h = real.torus(i, u);
    SMat hinv = smat_inv(F, h);
    Field::El scale = F.pow(u, pair);
    for (auto v : F.elements()) {
      SMat lhs = smat_mul(F, smat_mul(F, h, real.chi(gamma, v)), hinv);
      SMat rhs = real.chi(gamma, F.mul(v, scale));
      if (!(lhs == rhs)) {
        rep.pass = false;
        rep.witnesses.push_back("R4 fails at u=" + el_str(F, u) + ", v=" + el_str(F, v));
      }
    }
  }
  return rep;
}

CheckReport commutator_lemma_check(const Realization& real, size_t i) {
  const Field& F = real.field();
  CheckReport rep;
  rep.check = "relation:commutator_lemma";
  rep.case_name = to_string(real.rcase());
  rep.params = {{"i", std::to_string(i)}, {"q", std::to_string(F.q())}};
  RootVec alpha(2, 0);
  alpha[i - 1] = 1;
  rep.pass = true;
  bool any_t = false;
  for (auto t : F.nonzero_elements()) {
    Field::El t2 = F.mul(t, t);
    if (t2 == F.one()) continue;
    any_t = true;
    Field::El denom = F.inv(F.sub(t2, F.one()));
    for (auto u : F.elements()) {
      SMat lhs = real.chi(alpha, u);
      SMat rhs = smat_commutator(F, real.torus(i, t), real.chi(alpha, F.mul(u, denom)));
      if (!(lhs == rhs)) {
        rep.pass = false;
        rep.witnesses.push_back("fails at t=" + el_str(F, t) + ", u=" + el_str(F, u));
      }
    }
  }
  if (!any_t) {
    rep.pass = false;
    rep.witnesses.push_back("no t with t^2 != 1 exists; |k| > 3 hypothesis unmet");
  }
  return rep;
}

WellBehavedReport well_behaved_at_level(RCase c, const Field& F, int N, int64_t H, uint64_t cap) {
  Realization real(c, F, N);
  WellBehavedReport out;
  auto& rep = out.report;
  rep.check = "wellbehaved";
  rep.case_name = to_string(c);
  rep.params = {{"q", std::to_string(F.q())}, {"N", std::to_string(N)}, {"H", std::to_string(H)}};

  std::vector<SMat> gens;
  for (auto& g : real.generator_roots())
    for (auto u : F.basis_elements()) gens.push_back(real.chi(g, u));
  FinGroup Q = closure(F, real.dim(), N, gens, cap);
  FinGroup D = derived_subgroup(Q, cap);
  out.group_order = Q.order();
  out.derived_order = D.order();
  rep.params.push_back({"group_order", std::to_string(Q.order())});
  rep.params.push_back({"derived_order", std::to_string(D.order())});

  rep.pass = true;
  for (auto& g : real.generator_roots()) {
    if (height(g) == 1 || height(g) > H) continue;
    for (auto u : F.nonzero_elements()) {
      if (!D.contains(real.chi(g, u))) {
        rep.pass = false;
        rep.witnesses.push_back("WellBehavedFails(" + vec_to_string(g) + ", u=" + el_str(F, u) + ")");
      }
    }
  }
  return out;
}

namespace {

// Applies fn to every constant dim x dim matrix (the honest level-0 filter
// iterates all q^(dim^2) of them without materializing the list).
void for_each_constant(const Field& F, int dim, int N,
                       const std::function<void(const SMat&)>& fn) {
  uint64_t total = 1;
  for (int i = 0; i < dim * dim; ++i) total *= F.q();
  for (uint64_t code = 0; code < total; ++code) {
    uint64_t c = code;
    SMat m = smat_zero(dim, N);
    for (int i = dim * dim - 1; i >= 0; --i) {
      m.c[size_t(i * N)] = Field::El(c % F.q());
      c /= F.q();
    }
    fn(m);
  }
}

bool nontwisted_predicates(const Field& F, const SMat& g) {
  if (!is_upper_unitriangular_mod_t(F, g)) return false;
  auto det = smat_det(F, g);
  if (det[0] != F.one()) return false;
  for (size_t k = 1; k < det.size(); ++k)
    if (det[k] != 0) return false;
  return true;
}

bool twisted_predicates(const Field& F, const SMat& g) {
  return nontwisted_predicates(F, g) && is_unitary(F, g);
}

// Level-by-level enumeration: brute-force the constant level, then lift one
// t-degree at a time. The lifting condition "g (1 + X t^k) satisfies the
// predicates mod t^(k+1)" is affine in X, so the full solution set per element
// is base + kernel; every produced element is re-verified by the predicates.
// extra_rows, when provided, appends further affine conditions at level k
// (e.g. vanishing of specific coefficient entries for filtration subgroups).
std::vector<SMatKey> enumerate_by_lifting(
    const Field& F, int dim, int N, const std::function<bool(const Field&, const SMat&)>& pred,
    const std::function<std::vector<Field::El>(const SMat&, int)>& extra_rows = {}) {
  smat_key_check(F, dim, N);
  // Partial results are carried as packed keys at their truncation level;
  // the full matrices never have to be alive all at once.
  std::vector<SMatKey> cur;
  for_each_constant(F, dim, 1, [&](const SMat& m) {
    if (pred(F, m)) cur.push_back(smat_pack(F, m));
  });

  for (int k = 1; k < N; ++k) {
    std::vector<SMatKey> next;
    int nk = k + 1;
    for (auto& hkey : cur) {
      SMat h0 = smat_unpack(F, dim, k, hkey);
      SMat h = smat_zero(dim, nk);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          for (int s = 0; s < k; ++s) h.at(i, j, s) = h0.at(i, j, s);

      // residual(X): stack all predicate defects at coefficient t^k
      auto residual = [&](const SMat& g) {
        FqVec r;
        auto det = smat_det(F, g);
        r.push_back(F.sub(det[size_t(k)], 0));
        if (dim == 3) {
          SMat J = hermitian_form_J(F, nk);
          SMat u = smat_mul(F, smat_mul(F, J, smat_mul(F, sigma_star(F, g), J)), g);
          for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) r.push_back(u.at(i, j, k));
        }
        if (extra_rows) {
          auto extra = extra_rows(g, k);
          r.insert(r.end(), extra.begin(), extra.end());
        }
        return r;
      };
      auto with_X = [&](int bi, int bj, Field::El val) {
        SMat g = h;
        g.at(bi, bj, k) = F.add(g.at(bi, bj, k), val);
        return g;
      };
      FqVec r0 = residual(h);
      size_t rows = r0.size();
      FqMat L(rows, FqVec(size_t(dim) * dim, 0));
      for (int bi = 0; bi < dim; ++bi)
        for (int bj = 0; bj < dim; ++bj) {
          FqVec r1 = residual(with_X(bi, bj, F.one()));
          for (size_t t = 0; t < rows; ++t) L[t][size_t(bi * dim + bj)] = F.sub(r1[t], r0[t]);
        }
      FqVec rhs(rows);
      for (size_t t = 0; t < rows; ++t) rhs[t] = F.neg(r0[t]);
      auto x0 = fq_solve(F, L, rhs);
      if (!x0) continue;
      FqMat ker = fq_nullspace(F, L);

      // enumerate x0 + span(ker)
      std::vector<uint64_t> counter(ker.size(), 0);
      auto qn = F.q();
      uint64_t combos = 1;
      for (size_t i = 0; i < ker.size(); ++i) combos *= qn;
      auto elems = F.elements(F.q());
      for (uint64_t idx = 0; idx < combos; ++idx) {
        FqVec x = *x0;
        uint64_t t = idx;
        for (size_t ki = 0; ki < ker.size(); ++ki) {
          Field::El lam = elems[t % qn];
          t /= qn;
          if (lam != 0)
            for (size_t e = 0; e < x.size(); ++e) x[e] = F.add(x[e], F.mul(lam, ker[ki][e]));
        }
        SMat g = h;
        for (int bi = 0; bi < dim; ++bi)
          for (int bj = 0; bj < dim; ++bj) g.at(bi, bj, k) = x[size_t(bi * dim + bj)];
        next.push_back(smat_pack(F, g));
      }
    }
    cur = std::move(next);
  }

  for (auto& key : cur) {
    SMat g = smat_unpack(F, dim, N, key);
    if (!pred(F, g)) throw Error("DensityFails", "lifted element fails the defining predicates");
  }
  std::sort(cur.begin(), cur.end());
  cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
  return cur;
}

} // namespace

std::vector<SMatKey> enumerate_twisted_unitary_group(const Field& F, int N) {
  return enumerate_by_lifting(F, 3, N, twisted_predicates);
}

std::vector<SMatKey> enumerate_nontwisted_group(const Field& F, int N) {
  return enumerate_by_lifting(F, 2, N, nontwisted_predicates);
}

std::vector<SMatKey> enumerate_filtration_subgroup(RCase c, const Field& F, int N, int n) {
  Realization real(c, F, N);
  if (c == RCase::FiniteA2) throw Error("LevelOutOfRange", "no filtration in the finite case");
  if (n < 1 || n >= N) throw Error("LevelOutOfRange", "filtration level needs 1 <= n < N");
  int dim = real.dim();
  auto pred = [&](const Field& FF, const SMat& g) {
    bool base = (dim == 3) ? twisted_predicates(FF, g) : nontwisted_predicates(FF, g);
    if (!base) return false;
    // congruence part of P_n restricted to the truncation of g
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (g.at(i, j, 0) != (i == j ? FF.one() : 0)) return false;
        for (int k = 1; k < std::min<int>(n, g.N); ++k)
          if (g.at(i, j, k) != 0) return false;
      }
    if (n == 1 && g.N >= 2) {
      if (dim == 3 && g.at(2, 0, 1) != 0) return false;
      if (dim == 2 && (g.at(0, 0, 1) != 0 || g.at(1, 0, 1) != 0 || g.at(1, 1, 1) != 0)) return false;
    }
    return true;
  };
  // The congruence/entry conditions at level k are linear in the new
  // coefficient X, so they ride along as extra affine rows.
  auto extra = [&](const SMat& g, int k) {
    std::vector<Field::El> rows;
    if (k < n) {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) rows.push_back(g.at(i, j, k));
    } else if (k == 1 && n == 1) {
      if (dim == 3) rows.push_back(g.at(2, 0, 1));
      if (dim == 2) {
        rows.push_back(g.at(0, 0, 1));
        rows.push_back(g.at(1, 0, 1));
        rows.push_back(g.at(1, 1, 1));
      }
    }
    return rows;
  };
  return enumerate_by_lifting(F, dim, N, pred, extra);
}

DensityReport density_check(const Field& F, int N, uint64_t cap) {
  Realization real(RCase::Twisted, F, N);
  DensityReport out;
  auto& rep = out.report;
  rep.check = "density";
  rep.case_name = "case2";
  rep.params = {{"q", std::to_string(F.q())}, {"N", std::to_string(N)}};
  if (F.q() > 5 || N > 3)
    throw Error("ClosureCapExceeded", "density enumeration is limited to q <= 5, N <= 3");

  auto enumerated = enumerate_twisted_unitary_group(F, N);

  std::vector<SMat> gens;
  for (auto& g : real.generator_roots())
    for (auto u : F.basis_elements()) gens.push_back(real.chi(g, u));
  FinGroup G = closure(F, 3, N, gens, cap);

  out.predicate_count = enumerated.size();
  out.closure_count = G.order();
  rep.params.push_back({"predicate_count", std::to_string(enumerated.size())});
  rep.params.push_back({"closure_count", std::to_string(G.order())});

  rep.pass = (enumerated == G.elements());
  if (!rep.pass) {
    for (auto& k : enumerated) {
      if (!G.contains(k)) {
        rep.witnesses.push_back("DensityFails: predicate element not reached by the generators: " +
                                smat_to_string(F, smat_unpack(F, 3, N, k)));
        break;
      }
    }
    for (auto& k : G.elements()) {
      if (!std::binary_search(enumerated.begin(), enumerated.end(), k)) {
        rep.witnesses.push_back("closure element escapes the predicate set: " +
                                smat_to_string(F, smat_unpack(F, 3, N, k)));
        break;
      }
    }
  }
  return out;
}

} // namespace kmf
