#include <doctest.h>

#include <algorithm>

#include "kmf/gcm.hpp"

using namespace kmf;

TEST_CASE("GCM validation accepts and rejects per the axioms") {
  CHECK_NOTHROW(validate_gcm({{2, -1}, {-1, 2}}));
  CHECK_NOTHROW(validate_gcm({{2, -4}, {-1, 2}}));

  auto v = gcm_violations({{2, 0}, {-1, 2}});
  REQUIRE(v.size() == 1);
  CHECK(v[0].axiom == "ZeroAsymmetry");
  CHECK(v[0].i == 1);
  CHECK(v[0].j == 2);
  CHECK_THROWS_WITH_AS(validate_gcm({{2, 0}, {-1, 2}}), doctest::Contains("ZeroAsymmetry"), Error);

  CHECK_THROWS_WITH_AS(validate_gcm({{2, -1}}), doctest::Contains("NonSquare"), Error);
  CHECK_THROWS_WITH_AS(validate_gcm({{1}}), doctest::Contains("DiagonalNotTwo"), Error);
  CHECK_THROWS_WITH_AS(validate_gcm({{2, 1}, {1, 2}}), doctest::Contains("PositiveOffDiagonal"), Error);
}

TEST_CASE("submatrix extraction") {
  Gcm A = validate_gcm({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}});
  Gcm top = submatrix(A, {1, 2});
  CHECK(top.a == IntMat{{2, -1}, {-1, 2}});
  CHECK(submatrix(A, {1, 2, 3}).a == A.a); // J = I is allowed

  Gcm B = validate_gcm({{2, -2, 0}, {-2, 2, -1}, {0, -1, 2}});
  CHECK(submatrix(B, {1, 3}).a == IntMat{{2, 0}, {0, 2}});

  CHECK_THROWS_WITH_AS(submatrix(A, {}), doctest::Contains("EmptySubset"), Error);
  CHECK_THROWS_WITH_AS(submatrix(A, {4}), doctest::Contains("IndexOutOfRange"), Error);
}

TEST_CASE("indecomposable blocks") {
  CHECK(indecomposable_blocks(validate_gcm({{2, 0}, {0, 2}})) ==
        std::vector<std::vector<size_t>>{{1}, {2}});
  CHECK(indecomposable_blocks(validate_gcm({{2, -4}, {-1, 2}})) ==
        std::vector<std::vector<size_t>>{{1, 2}});
  CHECK(indecomposable_blocks(validate_gcm({{2, -1, 0}, {-1, 2, 0}, {0, 0, 2}})) ==
        std::vector<std::vector<size_t>>{{1, 2}, {3}});
}

TEST_CASE("classification by principal minors") {
  CHECK(classify(validate_gcm({{2}})).tag == CartanTag::Finite);
  CHECK(classify(validate_gcm({{2, -2}, {-2, 2}})).tag == CartanTag::Affine);
  CHECK(classify(validate_gcm({{2, -4}, {-1, 2}})).tag == CartanTag::Affine);
  auto t = classify(validate_gcm({{2, -3}, {-3, 2}})); // det = -5
  CHECK(t.tag == CartanTag::Indefinite);
  CHECK(t.hyperbolic);
  CHECK_THROWS_WITH_AS(classify(validate_gcm({{2, 0}, {0, 2}})), doctest::Contains("DecomposableInput"),
                       Error);
}

TEST_CASE("hyperbolic predicate") {
  CHECK(is_hyperbolic(validate_gcm({{2, -3}, {-3, 2}})));
  // det = -2; the 2x2 blocks are affine/finite
  CHECK(is_hyperbolic(validate_gcm({{2, -2, 0}, {-2, 2, -1}, {0, -1, 2}})));
  CHECK_THROWS_WITH_AS(is_hyperbolic(validate_gcm({{2, -2}, {-2, 2}})), doctest::Contains("NotIndefinite"),
                       Error);
  // an indefinite proper indecomposable submatrix kills hyperbolicity
  CHECK_FALSE(is_hyperbolic(validate_gcm({{2, -3, -1}, {-3, 2, -1}, {-1, -1, 2}})));
}

TEST_CASE("rank-2 oracle: product of off-diagonal entries") {
  for (int64_t a = -4; a <= -1; ++a) {
    for (int64_t b = -4; b <= -1; ++b) {
      auto t = classify(validate_gcm({{2, a}, {b, 2}}));
      int64_t prod = a * b;
      if (prod <= 3) CHECK(t.tag == CartanTag::Finite);
      if (prod == 4) CHECK(t.tag == CartanTag::Affine);
      if (prod >= 5) CHECK(t.tag == CartanTag::Indefinite);
    }
  }
}

TEST_CASE("classification is invariant under simultaneous permutation") {
  Gcm A = validate_gcm({{2, -4}, {-1, 2}});
  Gcm P = validate_gcm({{2, -1}, {-4, 2}});
  CHECK(classify(A).tag == classify(P).tag);

  Gcm B = validate_gcm({{2, -1, 0}, {-1, 2, -2}, {0, -2, 2}});
  // cyclic permutation (1 2 3)
  Gcm C = validate_gcm({{2, 0, -2}, {0, 2, -1}, {-2, -1, 2}});
  CHECK(classify(B).tag == classify(C).tag);
}

TEST_CASE("exact determinants") {
  CHECK(exact_det({{2, -3}, {-3, 2}}) == -5);
  CHECK(exact_det({{2, -2}, {-2, 2}}) == 0);
  CHECK(exact_det({{2, -2, 0}, {-2, 2, -1}, {0, -1, 2}}) == -2);
  CHECK(exact_det({{0, 1}, {1, 0}}) == -1); // pivot swap path
}

TEST_CASE("strict JSON parsing") {
  Gcm A = parse_gcm_json(R"({"name": "twisted", "entries": [[2, -4], [-1, 2]]})");
  CHECK(A.name == "twisted");
  CHECK(A.a == IntMat{{2, -4}, {-1, 2}});
  // round trip
  Gcm B = parse_gcm_json(gcm_to_json(A));
  CHECK(B.a == A.a);

  CHECK_THROWS_WITH_AS(parse_gcm_json(R"({"entries": [[2.5, -1], [-1, 2]]})"),
                       doctest::Contains("MalformedGCM"), Error);
  CHECK_THROWS_WITH_AS(parse_gcm_json(R"({"entries": [[2, 0], [-1, 2]]})"),
                       doctest::Contains("ZeroAsymmetry"), Error);
}

TEST_CASE("blockwise classification of decomposable matrices") {
  Gcm A = validate_gcm({{2, -1, 0}, {-1, 2, 0}, {0, 0, 2}});
  auto blocks = classify_blocks(A);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].first == std::vector<size_t>{1, 2});
  CHECK(blocks[0].second.tag == CartanTag::Finite);
  CHECK(blocks[1].first == std::vector<size_t>{3});
  CHECK(blocks[1].second.tag == CartanTag::Finite);
}

namespace {

// Lean minor-table evaluator for the size-4 sweep: all principal minors by
// mask, positivity closure by subset DP, connectivity by bitmask BFS.
struct Sweep4 {
  int64_t det[16];
  bool finAll[16]; // every nonempty submask has positive determinant
  bool conn[16];

  void eval(const int64_t a[4][4]) {
    for (int mask = 1; mask < 16; ++mask) {
      int idx[4], n = 0;
      for (int i = 0; i < 4; ++i)
        if (mask & (1 << i)) idx[n++] = i;
      __int128 m[4][4];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = a[idx[i]][idx[j]];
      __int128 prev = 1;
      int sign = 1;
      bool zero = false;
      for (int k = 0; k + 1 < n && !zero; ++k) {
        if (m[k][k] == 0) {
          int s = k + 1;
          while (s < n && m[s][k] == 0) ++s;
          if (s == n) {
            zero = true;
            break;
          }
          for (int j = 0; j < n; ++j) std::swap(m[k][j], m[s][j]);
          sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
          for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
      }
      det[mask] = zero ? 0 : int64_t(sign * m[n - 1][n - 1]);

      finAll[mask] = det[mask] > 0;
      for (int i = 0; i < 4 && finAll[mask]; ++i)
        if ((mask & (1 << i)) && mask != (1 << i)) finAll[mask] = finAll[mask ^ (1 << i)];

      // connectivity inside the mask
      int start = mask & (-mask), seen = start, frontier = start;
      while (frontier) {
        int next = 0;
        for (int i = 0; i < 4; ++i) {
          if (!(frontier & (1 << i))) continue;
          for (int j = 0; j < 4; ++j)
            if ((mask & (1 << j)) && !(seen & (1 << j)) && a[i][j] != 0) next |= (1 << j);
        }
        seen |= next;
        frontier = next;
      }
      conn[mask] = (seen == mask);
    }
  }

  bool proper_all_fin(int mask) const {
    for (int i = 0; i < 4; ++i)
      if ((mask & (1 << i)) && !finAll[mask ^ (1 << i)] && mask != (1 << i)) return false;
    return true;
  }
  // 0 finite, 1 affine, 2 indefinite (for a connected mask)
  int tag(int mask) const {
    if (finAll[mask]) return 0;
    if (det[mask] == 0 && proper_all_fin(mask)) return 1;
    return 2;
  }
};

} // namespace

TEST_CASE("trichotomy and submatrix type sweep at size 4") {
  std::vector<std::pair<int64_t, int64_t>> opts;
  opts.push_back({0, 0});
  for (int64_t a = -4; a <= -1; ++a)
    for (int64_t b = -4; b <= -1; ++b) opts.push_back({a, b});
  const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

  Sweep4 sw;
  size_t count = 0, stride_checked = 0;
  size_t combo = 0;
  int64_t a[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = (i == j) ? 2 : 0;

  std::vector<size_t> sel(6, 0);
  bool violation = false;
  for (sel[0] = 0; sel[0] < opts.size(); ++sel[0])
    for (sel[1] = 0; sel[1] < opts.size(); ++sel[1])
      for (sel[2] = 0; sel[2] < opts.size(); ++sel[2])
        for (sel[3] = 0; sel[3] < opts.size(); ++sel[3])
          for (sel[4] = 0; sel[4] < opts.size(); ++sel[4])
            for (sel[5] = 0; sel[5] < opts.size(); ++sel[5]) {
              ++combo;
              for (int p = 0; p < 6; ++p) {
                a[pairs[p][0]][pairs[p][1]] = opts[sel[p]].first;
                a[pairs[p][1]][pairs[p][0]] = opts[sel[p]].second;
              }
              sw.eval(a);
              if (!sw.conn[15]) continue;
              ++count;
              int t = sw.tag(15);
              // the three predicates are mutually exclusive by evaluation order;
              // check the finite/affine ones cannot overlap
              if (sw.finAll[15] && sw.det[15] == 0) violation = true;
              // hyperbolic => every submask of size <= 2 is of finite type
              if (t == 2) {
                bool hyper = true;
                for (int mask = 1; mask < 15 && hyper; ++mask)
                  if (sw.conn[mask] && sw.tag(mask) == 2) hyper = false;
                if (hyper) {
                  for (int mask = 1; mask < 15; ++mask) {
                    int sz = __builtin_popcount(unsigned(mask));
                    if (sz <= 2 && !sw.finAll[mask]) violation = true;
                  }
                }
              }
              // affine => every proper submask of finite type
              if (t == 1 && !sw.proper_all_fin(15)) violation = true;

              // cross-check the library classifier on a deterministic stride
              if (combo % 9973 == 0) {
                ++stride_checked;
                IntMat m(4, std::vector<int64_t>(4));
                for (int i = 0; i < 4; ++i)
                  for (int j = 0; j < 4; ++j) m[size_t(i)][size_t(j)] = a[i][j];
                auto got = classify(validate_gcm(m));
                int want = t;
                int gotTag = got.tag == CartanTag::Finite ? 0 : got.tag == CartanTag::Affine ? 1 : 2;
                if (gotTag != want) violation = true;
              }
            }
  CHECK_FALSE(violation);
  CHECK(count > 20000000); // the sweep really is exhaustive
  CHECK(stride_checked > 2000);
}
