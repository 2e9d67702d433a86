#include "kmf/gcm.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace kmf {

bool Gcm::symmetric() const {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j)
      if (a[i][j] != a[j][i]) return false;
  return true;
}

std::string to_string(CartanTag t) {
  switch (t) {
    case CartanTag::Finite: return "Finite";
    case CartanTag::Affine: return "Affine";
    case CartanTag::Indefinite: return "Indefinite";
  }
  return "?";
}

std::vector<GcmViolation> gcm_violations(const IntMat& entries) {
  std::vector<GcmViolation> v;
  size_t l = entries.size();
  if (l == 0) {
    v.push_back({"NonSquare", 0, 0});
    return v;
  }
  for (size_t i = 0; i < l; ++i) {
    if (entries[i].size() != l) {
      v.push_back({"NonSquare", i + 1, entries[i].size()});
      return v;
    }
  }
  for (size_t i = 0; i < l; ++i) {
    if (entries[i][i] != 2) v.push_back({"DiagonalNotTwo", i + 1, i + 1});
    for (size_t j = 0; j < l; ++j) {
      if (i == j) continue;
      if (entries[i][j] > 0) v.push_back({"PositiveOffDiagonal", i + 1, j + 1});
      if ((entries[i][j] == 0) != (entries[j][i] == 0) && i < j)
        v.push_back({"ZeroAsymmetry", i + 1, j + 1});
    }
  }
  return v;
}

Gcm validate_gcm(const IntMat& entries, std::string name) {
  auto v = gcm_violations(entries);
  if (!v.empty()) {
    std::ostringstream os;
    os << "matrix violates GCM axioms:";
    for (auto& x : v) os << " " << x.axiom << "(" << x.i << "," << x.j << ")";
    throw Error(v.front().axiom, os.str());
  }
  return Gcm{entries, std::move(name)};
}

Gcm submatrix(const Gcm& A, const std::vector<size_t>& J) {
  if (J.empty()) throw Error("EmptySubset", "submatrix index set is empty");
  for (size_t j : J)
    if (j < 1 || j > A.rank())
      throw Error("IndexOutOfRange", "index " + std::to_string(j) + " outside 1.." + std::to_string(A.rank()));
  IntMat b(J.size(), std::vector<int64_t>(J.size()));
  for (size_t r = 0; r < J.size(); ++r)
    for (size_t c = 0; c < J.size(); ++c) b[r][c] = A.a[J[r] - 1][J[c] - 1];
  return Gcm{std::move(b), A.name};
}

std::vector<std::vector<size_t>> indecomposable_blocks(const Gcm& A) {
  size_t l = A.rank();
  std::vector<int> comp(l, -1);
  int ncomp = 0;
  for (size_t s = 0; s < l; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<size_t> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      size_t i = stack.back();
      stack.pop_back();
      for (size_t j = 0; j < l; ++j) {
        if (comp[j] < 0 && A.a[i][j] != 0) {
          comp[j] = ncomp;
          stack.push_back(j);
        }
      }
    }
    ++ncomp;
  }
  std::vector<std::vector<size_t>> blocks(ncomp);
  for (size_t i = 0; i < l; ++i) blocks[comp[i]].push_back(i + 1);
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

bool is_indecomposable(const Gcm& A) { return indecomposable_blocks(A).size() == 1; }

int64_t exact_det(const IntMat& a) {
  size_t n = a.size();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination in 128-bit intermediates.
  std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
  __int128 prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      size_t s = k + 1;
      while (s < n && m[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(m[k], m[s]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return int64_t(sign * m[n - 1][n - 1]);
}

namespace {

// Iterates nonempty subsets of {1..l} as sorted index vectors.
void for_each_subset(size_t l, const std::function<void(const std::vector<size_t>&)>& fn) {
  for (uint64_t mask = 1; mask < (uint64_t(1) << l); ++mask) {
    std::vector<size_t> J;
    for (size_t i = 0; i < l; ++i)
      if (mask & (uint64_t(1) << i)) J.push_back(i + 1);
    fn(J);
  }
}

bool all_principal_minors_positive(const Gcm& A, bool proper_only) {
  size_t l = A.rank();
  bool ok = true;
  for_each_subset(l, [&](const std::vector<size_t>& J) {
    if (!ok) return;
    if (proper_only && J.size() == l) return;
    if (exact_det(submatrix(A, J).a) <= 0) ok = false;
  });
  return ok;
}

} // namespace

CartanType classify(const Gcm& A) {
  if (!is_indecomposable(A))
    throw Error("DecomposableInput", "classification of a decomposable matrix is reported per block");
  if (all_principal_minors_positive(A, false)) return {CartanTag::Finite, false};
  if (exact_det(A.a) == 0 && all_principal_minors_positive(A, true)) return {CartanTag::Affine, false};
  CartanType t{CartanTag::Indefinite, false};
  t.hyperbolic = is_hyperbolic(A);
  return t;
}

std::vector<std::pair<std::vector<size_t>, CartanType>> classify_blocks(const Gcm& A) {
  std::vector<std::pair<std::vector<size_t>, CartanType>> out;
  for (auto& b : indecomposable_blocks(A)) out.emplace_back(b, classify(submatrix(A, b)));
  return out;
}

bool is_hyperbolic(const Gcm& A) {
  if (!is_indecomposable(A)) throw Error("DecomposableInput", "hyperbolic test needs indecomposable input");
  // Same minor tests as classify, but without the hyperbolic recursion.
  if (all_principal_minors_positive(A, false)) throw Error("NotIndefinite", "matrix is of finite type");
  if (exact_det(A.a) == 0 && all_principal_minors_positive(A, true))
    throw Error("NotIndefinite", "matrix is of affine type");
  size_t l = A.rank();
  bool hyper = true;
  for_each_subset(l, [&](const std::vector<size_t>& J) {
    if (!hyper || J.size() == l) return;
    Gcm B = submatrix(A, J);
    if (!is_indecomposable(B)) return; // only indecomposable proper submatrices are tested
    if (all_principal_minors_positive(B, false)) return;
    if (exact_det(B.a) == 0 && all_principal_minors_positive(B, true)) return;
    hyper = false;
  });
  return hyper;
}

Gcm parse_gcm_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object() || !j.contains("entries"))
    throw Error("MalformedGCM", "expected an object with an \"entries\" field");
  std::string name = j.value("name", "");
  if (!j["entries"].is_array()) throw Error("MalformedGCM", "\"entries\" must be an array of rows");
  IntMat m;
  for (auto& row : j["entries"]) {
    if (!row.is_array()) throw Error("MalformedGCM", "each row must be an array");
    std::vector<int64_t> r;
    for (auto& x : row) {
      if (!x.is_number_integer())
        throw Error("MalformedGCM", "entries must be exact integers, got " + x.dump());
      r.push_back(x.get<int64_t>());
    }
    m.push_back(std::move(r));
  }
  return validate_gcm(m, name);
}

Gcm load_gcm_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("FileNotFound", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_gcm_json(ss.str());
}

std::string gcm_to_json(const Gcm& A) {
  nlohmann::ordered_json j;
  j["name"] = A.name;
  j["entries"] = A.a;
  return j.dump();
}

} // namespace kmf
