#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmf/error.hpp"

namespace kmf {

using IntMat = std::vector<std::vector<int64_t>>;

// A validated generalized Cartan matrix: square, integer, a_ii = 2,
// a_ij <= 0 off the diagonal, and a_ij = 0 iff a_ji = 0.
// Indices are 0-based internally and 1-based in all I/O.
struct Gcm {
  IntMat a;
  std::string name;

  size_t rank() const { return a.size(); }
  int64_t operator()(size_t i, size_t j) const { return a[i][j]; }
  bool symmetric() const;
};

struct GcmViolation {
  std::string axiom; // NonSquare | DiagonalNotTwo | PositiveOffDiagonal | ZeroAsymmetry
  size_t i = 0, j = 0; // 1-based positions, when applicable
};

enum class CartanTag { Finite, Affine, Indefinite };

struct CartanType {
  CartanTag tag;
  bool hyperbolic = false; // meaningful only for Indefinite
};

std::string to_string(CartanTag t);

// Empty result means the matrix is a valid GCM.
std::vector<GcmViolation> gcm_violations(const IntMat& entries);

// Throws Error with the first violation's axiom as code.
Gcm validate_gcm(const IntMat& entries, std::string name = "");

// J is 1-based and must be nonempty; the result inherits the GCM axioms.
Gcm submatrix(const Gcm& A, const std::vector<size_t>& J);

// Connected components of the graph with an edge wherever a_ij != 0,
// returned as sorted 1-based index lists, ordered by smallest member.
std::vector<std::vector<size_t>> indecomposable_blocks(const Gcm& A);

bool is_indecomposable(const Gcm& A);

// Exact determinant (fraction-free elimination, big intermediates).
int64_t exact_det(const IntMat& a);

// Principal-minor classification of an indecomposable GCM:
//   Finite      iff every principal minor is > 0,
//   Affine      iff det = 0 and every proper principal minor is > 0,
//   Indefinite  otherwise (hyperbolic flag filled in).
// Throws Error("DecomposableInput", ...) on decomposable input.
CartanType classify(const Gcm& A);

// Per-block classification, defined for any valid GCM.
std::vector<std::pair<std::vector<size_t>, CartanType>> classify_blocks(const Gcm& A);

// True iff every proper indecomposable submatrix is of finite or affine type.
// Requires indecomposable indefinite input (Error("NotIndefinite") otherwise).
bool is_hyperbolic(const Gcm& A);

// Strict JSON I/O: {"name": string, "entries": [[int,...],...]}.
Gcm load_gcm_json(const std::string& path);
Gcm parse_gcm_json(const std::string& text);
std::string gcm_to_json(const Gcm& A);

} // namespace kmf
