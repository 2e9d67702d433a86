#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmf/fq_linalg.hpp"
#include "kmf/pgroup.hpp"
#include "kmf/roots.hpp"
#include "kmf/tseries.hpp"

namespace kmf {

enum class RCase { NonTwisted, Twisted, FiniteA2 };

std::string to_string(RCase c);
RCase rcase_from_string(const std::string& s); // "case1" | "case2" | "a2"

// The Cartan matrix of the case: [[2,-2],[-2,2]], [[2,-4],[-1,2]] or A2.
Gcm case_gcm(RCase c);

// One concrete realization of the positive unipotent group at truncation
// level N over F: the non-twisted case inside SL_2(k[t]/t^N), the twisted
// case inside the unitary group SU_3 relative to sigma(t) = -t and the
// anti-diagonal form J, and the finite A2 case as unitriangular 3x3 matrices.
class Realization {
public:
  Realization(RCase rcase, const Field& F, int N);

  RCase rcase() const { return rcase_; }
  const Field& field() const { return *F_; }
  int trunc() const { return N_; }
  int dim() const { return rcase_ == RCase::NonTwisted ? 2 : 3; }
  const Gcm& cartan() const { return A_; }

  bool realizes(const RootVec& gamma) const; // positive root of the realized system
  int t_degree(const RootVec& gamma) const;  // exponent from the generator table

  // chi_gamma(u); Error("NotAPositiveRealRoot") for anything unrealized.
  SMat chi(const RootVec& gamma, Field::El u) const;

  // h_n(u): diag(1 + u t^n, (1 + u t^n)^-1) in the non-twisted case, the
  // commutator [e_0^(1)(u), f_n^(1)(1)] in the twisted case.
  SMat h_elem(int n, Field::El u) const;

  // Constant diagonal torus element h_i(u), u nonzero; conjugation action
  // realizes relation R4.
  SMat torus(size_t i, Field::El u) const;

  bool in_group(const SMat& g) const;

  // Filtration P_n: congruence level n for n >= 2; at n = 1, membership in
  // P_2 E_1 (non-twisted) resp. the vanishing-(3,1)-entry condition (twisted).
  bool filtration_member(const SMat& g, int n) const;

  // Positive roots whose generator images are nontrivial mod t^N,
  // sorted by (height, lex).
  std::vector<RootVec> generator_roots() const;

  // Z_n generator family as (root or h-marker, u) images; u runs over k^*.
  std::vector<SMat> z_family(int n) const;

private:
  RCase rcase_;
  const Field* F_;
  int N_;
  Gcm A_;
  Field::El half_, quarter_; // set when p > 2

  struct TableEntry {
    SMat e;   // constant matrix e_gamma (without the t power)
    int tdeg; // t exponent
  };
  std::optional<TableEntry> lookup(const RootVec& gamma) const;
};

// k-basis of the twisted level space L_n: {X : X^t J = (-1)^(n+1) J X, tr X = 0},
// intersected with {X_31 = 0} at n = 1. Rows are 9-entry row-major matrices.
FqMat ln_basis(const Field& F, int n);

// Level space of the non-twisted filtration: sl_2 for n >= 2, k*E_12 at n = 1.
FqMat nontwisted_level_basis(const Field& F, int n);

struct CheckReport {
  std::string check;
  std::string case_name;
  std::vector<std::pair<std::string, std::string>> params;
  bool pass = false;
  std::vector<std::string> witnesses;
};

// Leading coefficients of Z_n all have degree exactly n and span the level
// space; run at truncation N = n + 2.
CheckReport span_check(RCase c, const Field& F, int n);

// The displayed congruence identities, by name:
//   case1: "e-step" (n >= 1), "f-step" (n >= 2), "h-step" (n >= 2)
//   case2: "e1-even"/"f1-even" (even n >= 2), "e1-odd"/"f1-odd"/"f2-odd"
//          (odd n >= 3), "e2-odd" (odd n >= 1)
// Each asserts lhs^-1 rhs in P_{n+1} for all u, at truncation N = n + 2.
CheckReport congruence_identity_check(RCase c, const Field& F, const std::string& id, int n);

std::vector<std::string> congruence_identity_names(RCase c);
bool congruence_identity_level_ok(const std::string& id, int n);

// R1 additivity of chi_gamma over all u, v.
CheckReport relation_r1_check(const Realization& real, const RootVec& gamma);

struct R2Constant {
  int64_t m, n;
  RootVec root;
  Field::El value;   // constant in the realization field
  int64_t lifted;    // symmetric lift to (-p/2, p/2]
};

struct R2Result {
  CheckReport report;
  std::vector<R2Constant> constants; // in height-then-lex product order
};

// Expresses [chi_a(u), chi_b(v)] as the ordered product over cone roots and
// solves the structure constants; asserts c(u,v) = C u^m v^n for all u, v.
R2Result relation_r2_check(const Realization& real, const RootDatum& datum, const RootVec& a,
                           const RootVec& b, int64_t bound = 12);

// R4: h_i(u) chi_gamma(v) h_i(u)^-1 = chi_gamma(v u^<gamma, alpha_i^vee>).
CheckReport relation_r4_check(const Realization& real, const RootVec& gamma, size_t i);

// chi_i(u) = [h_i(t), chi_i(u / (t^2 - 1))] for every t with t^2 != 1.
CheckReport commutator_lemma_check(const Realization& real, size_t i);

struct WellBehavedReport {
  CheckReport report;
  uint64_t group_order = 0;
  uint64_t derived_order = 0;
};

// Builds the finite quotient generated by all positive-root images that are
// nontrivial mod t^N and checks that every non-simple positive root image of
// height <= H lies in its derived subgroup.
WellBehavedReport well_behaved_at_level(RCase c, const Field& F, int N, int64_t H,
                                        uint64_t cap = 2000000);

struct DensityReport {
  CheckReport report;
  uint64_t predicate_count = 0;
  uint64_t closure_count = 0;
};

// Twisted only: the predicate-enumerated set {det 1, unitary, unitriangular
// mod t} mod t^N equals the closure of the realized generators.
DensityReport density_check(const Field& F, int N, uint64_t cap = 2100000);

// Enumerates the full twisted group mod t^N by predicate filtering and
// level-by-level affine lifting (used by density_check and cross-checks).
std::vector<SMatKey> enumerate_twisted_unitary_group(const Field& F, int N);

// Same for the non-twisted group {det 1, unitriangular mod t} mod t^N.
std::vector<SMatKey> enumerate_nontwisted_group(const Field& F, int N);

// Filtration subgroups P_n mod t^N by the same predicate enumeration,
// independent of any generator closure.
std::vector<SMatKey> enumerate_filtration_subgroup(RCase c, const Field& F, int N, int n);

} // namespace kmf
