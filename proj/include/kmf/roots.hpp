#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmf/gcm.hpp"

namespace kmf {

// Integer coordinate vectors over the simple-root / simple-coroot bases.
using RootVec = std::vector<int64_t>;
using CorootVec = std::vector<int64_t>;

// A Weyl word [i1, i2, ..., im] (1-based letters) acts as w_{i1} w_{i2} ... w_{im},
// i.e. the rightmost letter is applied first.
using WeylWord = std::vector<size_t>;

int64_t height(const RootVec& v);
bool is_positive_root_vec(const RootVec& v); // all coords >= 0, not all zero
bool is_negative_root_vec(const RootVec& v);
std::string vec_to_string(const RootVec& v);

// w_i(alpha) = alpha - <alpha, alpha_i^vee> alpha_i, with <alpha_j, alpha_i^vee> = a_ij.
RootVec reflect(const Gcm& A, size_t i, const RootVec& alpha);
// Dual action on coroots: w_i(h) = h - <alpha_i, h> alpha_i^vee.
CorootVec reflect_coroot(const Gcm& A, size_t i, const CorootVec& h);

RootVec apply_word(const Gcm& A, const WeylWord& w, RootVec alpha);
CorootVec apply_word_coroot(const Gcm& A, const WeylWord& w, CorootVec h);

// <alpha, h> = sum_{i,j} n_j m_i a_ij for alpha = sum n_j alpha_j, h = sum m_i alpha_i^vee.
int64_t pairing(const Gcm& A, const RootVec& alpha, const CorootVec& h);

// (alpha, beta) = sum n_i m_j a_ij; defined only for symmetric A.
int64_t invariant_form(const Gcm& A, const RootVec& alpha, const RootVec& beta);

struct RootEntry {
  RootVec alpha;
  CorootVec coroot;
  WeylWord witness; // alpha = witness(alpha_base)
  size_t base;      // 1-based simple root index
};

// All real roots with |height| <= horizon, with coroots and witness words.
class RootDatum {
public:
  RootDatum(Gcm A, int64_t horizon, size_t root_cap = 200000);

  const Gcm& matrix() const { return A_; }
  int64_t horizon() const { return horizon_; }

  bool contains(const RootVec& v) const;
  const RootEntry& entry(const RootVec& v) const; // throws NotARealRoot
  const std::vector<RootEntry>& roots() const { return roots_; }

  // Positive roots sorted by (height, lex).
  std::vector<RootVec> positive_roots() const;

  const CorootVec& coroot(const RootVec& alpha) const { return entry(alpha).coroot; }

private:
  Gcm A_;
  int64_t horizon_;
  std::vector<RootEntry> roots_;
  std::map<RootVec, size_t> index_;
};

RootDatum enumerate_real_roots(const Gcm& A, int64_t H, size_t root_cap = 200000);

// Decision rule for |(Z_{>0} a + Z_{>0} b) n Phi| < infinity:
// false if a = -b; true if a = b; otherwise with p = <a, b^vee>, q = <b, a^vee>:
// true if p >= 0 or pq <= 3, false if p <= -1 and pq >= 4.
bool is_prenilpotent(const RootDatum& datum, const RootVec& a, const RootVec& b);

struct ConeRoot {
  int64_t m, n;
  RootVec root; // m*a + n*b
};

// All real roots m*a + n*b with 1 <= m, n <= bound, by brute-force lookup.
// Throws Error("HorizonExceeded") when some candidate's height leaves the horizon.
std::vector<ConeRoot> cone_roots(const RootDatum& datum, const RootVec& a, const RootVec& b,
                                 int64_t bound);

struct WJDecomposition {
  WeylWord w;  // letters in J
  RootVec beta; // in Psi_J: <beta, alpha_j^vee> <= 0 for all j in J
};

// Height-descent decomposition gamma = w(beta) for gamma in Phi+ \ Phi_J+.
WJDecomposition decompose_over_WJ(const RootDatum& datum, const std::vector<size_t>& J,
                                  const RootVec& gamma);

struct Rank2Reduction {
  WeylWord w;
  size_t i, j;  // 1-based simple root indices
  RootVec alpha; // non-simple positive root supported on {i, j}
};

// Writes a non-simple positive gamma as w(alpha) with w(alpha_i) > 0,
// w(alpha_j) > 0 and alpha a non-simple positive root of the {i,j} subsystem.
Rank2Reduction rank2_reduce(const RootDatum& datum, const RootVec& gamma);

} // namespace kmf
