#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "kmf/tseries.hpp"

namespace kmf {

// An explicitly enumerated finite group of truncated series matrices.
// Elements are held as canonical 128-bit keys in ascending order, so equal
// groups compare equal byte-for-byte regardless of how they were produced.
class FinGroup {
public:
  FinGroup(const Field& F, int dim, int N, std::vector<SMat> generators, std::vector<SMatKey> sorted_keys);

  const Field& field() const { return *F_; }
  int dim() const { return dim_; }
  int trunc() const { return N_; }
  uint64_t order() const { return keys_.size(); }

  const std::vector<SMatKey>& elements() const { return keys_; }
  const std::vector<SMat>& generators() const { return gens_; }

  bool contains(const SMatKey& k) const;
  bool contains(const SMat& g) const { return contains(smat_pack(*F_, g)); }
  SMat element(size_t idx) const { return smat_unpack(*F_, dim_, N_, keys_[idx]); }

  // True when every element of `other` is an element of *this.
  bool contains_all(const FinGroup& other) const;

  // |G| = p^a test; valid p-group closures of pro-unipotent generators always pass.
  bool is_p_power_order() const;

private:
  const Field* F_;
  int dim_, N_;
  std::vector<SMat> gens_;
  std::vector<SMatKey> keys_; // ascending
};

// Breadth-first multiplicative closure of the generators (identity included).
// Workers can be raised via KMFORGE_THREADS; the resulting element set is
// canonical (sorted) regardless of worker count.
FinGroup closure(const Field& F, int dim, int N, const std::vector<SMat>& generators,
                 uint64_t cap = 2000000);

// Extends a known subgroup by extra generators (same canonical result).
FinGroup closure_extend(const FinGroup& base, const std::vector<SMat>& extra, uint64_t cap = 2000000);

// Subgroup generated by all commutators: normal closure of the pairwise
// generator commutators under conjugation by the group generators.
FinGroup derived_subgroup(const FinGroup& G, uint64_t cap = 2000000);

// K* = [K,K] K^p, the Frattini subgroup of a finite p-group.
FinGroup frattini_star(const FinGroup& K, uint64_t cap = 2000000);

// A short generating list for G, found greedily over the canonical order.
std::vector<SMat> small_generating_set(const FinGroup& G);

// (X generates K, image of X in K/K* generates the quotient); the two are
// computed independently. X must consist of elements of K.
std::pair<bool, bool> generation_check(const FinGroup& K, const std::vector<SMat>& X,
                                       const FinGroup* precomputed_star = nullptr);

struct WidthReport {
  bool pass = false;
  uint64_t derived_order = 0;
  uint64_t product_set_order = 0;
  std::string witness; // an element of [K,K] missed by the product set, on failure
};

// Checks that every element of [K,K] equals [a_1,g_1]...[a_d,g_d] with g_i in K.
// The a_i must generate K. Fully exhaustive; keep |K| small.
WidthReport commutator_width_check(const FinGroup& K, const std::vector<SMat>& a,
                                   uint64_t pair_cap = 20000);

struct FiltrationLevel {
  std::string name;
  std::function<bool(const SMat&)> member; // subgroup predicate on elements of P
  std::vector<SMat> generators;            // the g_{i,j} for this level
};

struct FiltrationReport {
  bool pass = false;
  std::vector<std::string> hypothesis_lines; // one entry per level: held / failed
  std::string failure; // ChainNotNormal / HypothesisFails detail, empty on pass
};

// Finite-scale generation check along a descending normal chain: if every
// listed generator of level i lies in K * P_{i+1} for K the derived subgroup
// of P, then P_1 is contained in K * P_bottom. The bottom level must be
// trivial at truncation for the conclusion "P_1 <= K" to be tested.
FiltrationReport filtration_generation_check(const FinGroup& P, const std::vector<FiltrationLevel>& levels,
                                             uint64_t cap = 2000000);

// Worker count: KMFORGE_THREADS if set, else 1.
unsigned worker_count();

} // namespace kmf
