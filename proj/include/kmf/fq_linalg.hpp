#pragma once

#include <optional>
#include <vector>

#include "kmf/ffield.hpp"

namespace kmf {

// Dense row-major matrices over a small finite field, just enough linear
// algebra for rank/span/solve questions on level spaces.
using FqVec = std::vector<Field::El>;
using FqMat = std::vector<FqVec>;

// In-place reduced row echelon form; returns pivot column indices.
std::vector<size_t> fq_rref(const Field& F, FqMat& a);

size_t fq_rank(const Field& F, FqMat a);

// True when v lies in the row span of `a`.
bool fq_in_span(const Field& F, const FqMat& a, const FqVec& v);

// True when the two row spans coincide.
bool fq_same_span(const Field& F, const FqMat& a, const FqMat& b);

// One solution of A x = b, or nullopt when inconsistent.
std::optional<FqVec> fq_solve(const Field& F, FqMat a, FqVec b);

// Basis of the kernel of A (as row vectors).
FqMat fq_nullspace(const Field& F, FqMat a);

} // namespace kmf
