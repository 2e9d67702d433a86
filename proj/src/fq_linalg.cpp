#include "kmf/fq_linalg.hpp"

namespace kmf {

std::vector<size_t> fq_rref(const Field& F, FqMat& a) {
  std::vector<size_t> pivots;
  if (a.empty()) return pivots;
  size_t rows = a.size(), cols = a[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = r;
    while (sel < rows && a[sel][c] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(a[sel], a[r]);
    Field::El piv = F.inv(a[r][c]);
    for (size_t j = c; j < cols; ++j) a[r][j] = F.mul(a[r][j], piv);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Field::El f = a[i][c];
      for (size_t j = c; j < cols; ++j) a[i][j] = F.sub(a[i][j], F.mul(f, a[r][j]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

size_t fq_rank(const Field& F, FqMat a) { return fq_rref(F, a).size(); }

bool fq_in_span(const Field& F, const FqMat& a, const FqVec& v) {
  FqMat b = a;
  size_t r0 = fq_rank(F, b);
  b = a;
  b.push_back(v);
  return fq_rank(F, b) == r0;
}

bool fq_same_span(const Field& F, const FqMat& a, const FqMat& b) {
  FqMat ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  size_t ra = fq_rank(F, a), rb = fq_rank(F, b), rab = fq_rank(F, ab);
  return ra == rb && rb == rab;
}

std::optional<FqVec> fq_solve(const Field& F, FqMat a, FqVec b) {
  size_t rows = a.size();
  size_t cols = rows ? a[0].size() : 0;
  FqMat aug = std::move(a);
  for (size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
  auto pivots = fq_rref(F, aug);
  // Inconsistent iff a pivot lands in the augmented column.
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  FqVec x(cols, 0);
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][cols];
  return x;
}

FqMat fq_nullspace(const Field& F, FqMat a) {
  size_t cols = a.empty() ? 0 : a[0].size();
  auto pivots = fq_rref(F, a);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivots) is_pivot[c] = true;
  FqMat basis;
  for (size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    FqVec v(cols, 0);
    v[free] = F.one();
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = F.neg(a[r][free]);
    basis.push_back(std::move(v));
  }
  return basis;
}

} // namespace kmf
