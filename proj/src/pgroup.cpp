#include "kmf/pgroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace kmf {

unsigned worker_count() {
  if (const char* env = std::getenv("KMFORGE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 64) return unsigned(v);
  }
  return 1;
}

FinGroup::FinGroup(const Field& F, int dim, int N, std::vector<SMat> generators,
                   std::vector<SMatKey> sorted_keys)
    : F_(&F), dim_(dim), N_(N), gens_(std::move(generators)), keys_(std::move(sorted_keys)) {}

bool FinGroup::contains(const SMatKey& k) const {
  return std::binary_search(keys_.begin(), keys_.end(), k);
}

bool FinGroup::contains_all(const FinGroup& other) const {
  return std::includes(keys_.begin(), keys_.end(), other.keys_.begin(), other.keys_.end());
}

bool FinGroup::is_p_power_order() const {
  uint64_t n = order();
  uint64_t p = F_->p();
  while (n % p == 0) n /= p;
  return n == 1;
}

namespace {

// BFS closure core. Starting elements must include everything that should be
// seeded (the identity is always added). Finite ambient group makes inverse
// closure automatic.
std::vector<SMatKey> close_keys(const Field& F, int dim, int N, const std::vector<SMat>& gens,
                                const std::vector<SMatKey>& seeds, uint64_t cap) {
  smat_key_check(F, dim, N);
  std::unordered_set<SMatKey, SMatKeyHash> seen;
  seen.reserve(1 << 16);
  std::vector<SMatKey> frontier;
  SMat id = smat_identity(F, dim, N);
  seen.insert(smat_pack(F, id));
  frontier.push_back(smat_pack(F, id));
  for (auto& k : seeds) {
    if (seen.insert(k).second) frontier.push_back(k);
  }

  unsigned workers = worker_count();
  while (!frontier.empty()) {
    std::vector<SMatKey> produced;
    if (workers <= 1 || frontier.size() < 256) {
      produced.reserve(frontier.size() * gens.size());
      for (auto& k : frontier) {
        SMat x = smat_unpack(F, dim, N, k);
        for (auto& g : gens) produced.push_back(smat_pack(F, smat_mul(F, x, g)));
      }
    } else {
      std::vector<std::vector<SMatKey>> parts(workers);
      std::vector<std::thread> pool;
      size_t chunk = (frontier.size() + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
          size_t lo = w * chunk, hi = std::min(frontier.size(), lo + chunk);
          auto& out = parts[w];
          out.reserve((hi - lo) * gens.size());
          for (size_t idx = lo; idx < hi; ++idx) {
            SMat x = smat_unpack(F, dim, N, frontier[idx]);
            for (auto& g : gens) out.push_back(smat_pack(F, smat_mul(F, x, g)));
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& part : parts) produced.insert(produced.end(), part.begin(), part.end());
    }
    frontier.clear();
    for (auto& k : produced) {
      if (seen.insert(k).second) {
        frontier.push_back(k);
        if (seen.size() > cap)
          throw Error("ClosureCapExceeded", "group closure exceeded cap of " + std::to_string(cap));
      }
    }
  }
  std::vector<SMatKey> keys(seen.begin(), seen.end());
  std::sort(keys.begin(), keys.end());
  return keys;
}

} // namespace

FinGroup closure(const Field& F, int dim, int N, const std::vector<SMat>& generators, uint64_t cap) {
  for (auto& g : generators)
    if (g.dim != dim || g.N != N) throw Error("BadShape", "generator shape mismatch");
  auto keys = close_keys(F, dim, N, generators, {}, cap);
  return FinGroup(F, dim, N, generators, std::move(keys));
}

FinGroup closure_extend(const FinGroup& base, const std::vector<SMat>& extra, uint64_t cap) {
  std::vector<SMat> gens = base.generators();
  gens.insert(gens.end(), extra.begin(), extra.end());
  auto keys = close_keys(base.field(), base.dim(), base.trunc(), gens, base.elements(), cap);
  return FinGroup(base.field(), base.dim(), base.trunc(), gens, std::move(keys));
}

namespace {

// Adds c as a generator when it is not already a member; keeps the generator
// list short so repeated extensions stay cheap.
bool extend_if_new(FinGroup& D, const SMat& c, uint64_t cap) {
  if (D.contains(c)) return false;
  std::vector<SMat> gens = D.generators();
  gens.push_back(c);
  auto keys = close_keys(D.field(), D.dim(), D.trunc(), gens, D.elements(), cap);
  D = FinGroup(D.field(), D.dim(), D.trunc(), gens, std::move(keys));
  return true;
}

} // namespace

FinGroup derived_subgroup(const FinGroup& G, uint64_t cap) {
  const Field& F = G.field();
  const auto& gens = G.generators();
  if (gens.empty() && G.order() > 1)
    throw Error("NotGenerating", "derived subgroup needs a generating list for the group");
  FinGroup D = closure(F, G.dim(), G.trunc(), {}, cap);
  for (auto& a : gens)
    for (auto& b : gens) extend_if_new(D, smat_commutator(F, a, b), cap);

  // Normal closure: conjugate the running generating set by group generators
  // until nothing new appears.
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<SMat> snapshot = D.generators();
    for (auto& s : snapshot) {
      for (auto& g : gens) {
        SMat c = smat_mul(F, smat_mul(F, g, s), smat_inv(F, g));
        if (extend_if_new(D, c, cap)) grew = true;
      }
    }
  }
  return D;
}

FinGroup frattini_star(const FinGroup& K, uint64_t cap) {
  if (!K.is_p_power_order())
    throw Error("NotAPGroup", "group order " + std::to_string(K.order()) + " is not a power of p");
  const Field& F = K.field();
  FinGroup S = derived_subgroup(K, cap);
  uint64_t p = F.p();
  for (size_t i = 0; i < K.order(); ++i) {
    SMat xp = smat_pow(F, K.element(i), p);
    extend_if_new(S, xp, cap);
  }
  // Compact generator list so later closures over K* stay cheap.
  auto sg = small_generating_set(S);
  return FinGroup(F, S.dim(), S.trunc(), sg, S.elements());
}

std::vector<SMat> small_generating_set(const FinGroup& G) {
  const Field& F = G.field();
  std::vector<SMat> gens;
  FinGroup H = closure(F, G.dim(), G.trunc(), {}, G.order() + 1);
  for (size_t i = 0; i < G.order() && H.order() < G.order(); ++i) {
    SMat x = G.element(i);
    if (!H.contains(x)) {
      gens.push_back(x);
      H = closure_extend(H, {x}, G.order() + 1);
    }
  }
  return gens;
}

std::pair<bool, bool> generation_check(const FinGroup& K, const std::vector<SMat>& X,
                                       const FinGroup* precomputed_star) {
  const Field& F = K.field();
  for (auto& x : X)
    if (!K.contains(x)) throw Error("NotASubset", "test set has an element outside K");
  FinGroup H = closure(F, K.dim(), K.trunc(), X, K.order() + 1);
  bool generates = H.order() == K.order();

  FinGroup star = precomputed_star ? *precomputed_star : frattini_star(K);
  std::vector<SMat> with_star = X;
  auto sg = star.generators();
  with_star.insert(with_star.end(), sg.begin(), sg.end());
  FinGroup H2 = closure(F, K.dim(), K.trunc(), with_star, K.order() + 1);
  bool image_generates = H2.order() == K.order();
  return {generates, image_generates};
}

WidthReport commutator_width_check(const FinGroup& K, const std::vector<SMat>& a, uint64_t pair_cap) {
  const Field& F = K.field();
  if (K.order() > pair_cap)
    throw Error("ClosureCapExceeded", "commutator width check limited to order " + std::to_string(pair_cap));
  {
    FinGroup H = closure(F, K.dim(), K.trunc(), a, K.order() + 1);
    if (H.order() != K.order()) throw Error("NotGenerating", "the a_i must generate K");
  }
  // derive from the verified generating set, not whatever K was built with
  FinGroup D = derived_subgroup(FinGroup(F, K.dim(), K.trunc(), a, K.elements()));

  // product sets S_i = { s * [a_i, g] : s in S_{i-1}, g in K }
  std::unordered_set<SMatKey, SMatKeyHash> S;
  S.insert(smat_pack(F, smat_identity(F, K.dim(), K.trunc())));
  for (auto& ai : a) {
    std::unordered_set<SMatKey, SMatKeyHash> next;
    SMat ai_inv = smat_inv(F, ai);
    for (size_t gi = 0; gi < K.order(); ++gi) {
      SMat g = K.element(gi);
      SMat com = smat_mul(F, smat_mul(F, ai, g), smat_mul(F, ai_inv, smat_inv(F, g)));
      for (auto& sk : S) {
        SMat s = smat_unpack(F, K.dim(), K.trunc(), sk);
        next.insert(smat_pack(F, smat_mul(F, s, com)));
      }
    }
    S = std::move(next);
  }

  WidthReport r;
  r.derived_order = D.order();
  r.product_set_order = S.size();
  r.pass = true;
  for (size_t i = 0; i < D.order(); ++i) {
    if (!S.count(D.elements()[i])) {
      r.pass = false;
      r.witness = smat_to_string(F, D.element(i));
      break;
    }
  }
  return r;
}

FiltrationReport filtration_generation_check(const FinGroup& P, const std::vector<FiltrationLevel>& levels,
                                             uint64_t cap) {
  const Field& F = P.field();
  FiltrationReport rep;

  // Materialize each level as an element set and validate the chain.
  std::vector<std::vector<SMatKey>> level_keys(levels.size());
  for (size_t i = 0; i < levels.size(); ++i) {
    for (size_t e = 0; e < P.order(); ++e) {
      SMat x = P.element(e);
      if (levels[i].member(x)) level_keys[i].push_back(P.elements()[e]);
    }
  }
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    if (!std::includes(level_keys[i].begin(), level_keys[i].end(), level_keys[i + 1].begin(),
                       level_keys[i + 1].end())) {
      rep.failure = "ChainNotNormal: level " + levels[i + 1].name + " is not contained in " + levels[i].name;
      return rep;
    }
  }
  for (size_t i = 0; i < levels.size(); ++i) {
    // subgroup check
    auto in_level = [&](const SMat& m) {
      return std::binary_search(level_keys[i].begin(), level_keys[i].end(), smat_pack(F, m));
    };
    std::vector<SMat> elems;
    for (auto& k : level_keys[i]) elems.push_back(smat_unpack(F, P.dim(), P.trunc(), k));
    for (size_t x = 0; x < std::min<size_t>(elems.size(), 64); ++x)
      for (size_t y = 0; y < std::min<size_t>(elems.size(), 64); ++y)
        if (!in_level(smat_mul(F, elems[x], elems[y]))) {
          rep.failure = "ChainNotNormal: level " + levels[i].name + " is not a subgroup";
          return rep;
        }
    // normality in P via generator conjugation
    for (auto& g : P.generators()) {
      SMat gi = smat_inv(F, g);
      for (auto& s : elems) {
        if (!in_level(smat_mul(F, smat_mul(F, g, s), gi))) {
          rep.failure = "ChainNotNormal: level " + levels[i].name + " is not normal in P";
          return rep;
        }
      }
    }
  }
  if (level_keys.back().size() != 1) {
    rep.failure = "ChainNotNormal: bottom level is not trivial at truncation";
    return rep;
  }

  FinGroup K = derived_subgroup(P, cap);
  auto kgens = small_generating_set(K);

  // Hypothesis: every listed generator of level i lies in K * P_{i+1}.
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    std::vector<SMat> kp_gens = kgens;
    for (auto& k : level_keys[i + 1]) kp_gens.push_back(smat_unpack(F, P.dim(), P.trunc(), k));
    FinGroup KP = closure(F, P.dim(), P.trunc(), kp_gens, cap);
    bool ok = true;
    for (auto& g : levels[i].generators) {
      if (!KP.contains(g)) {
        ok = false;
        rep.failure = "HypothesisFails(" + levels[i].name + ")";
        break;
      }
    }
    rep.hypothesis_lines.push_back(levels[i].name + ": " + (ok ? "holds" : "fails"));
    if (!ok) return rep;
  }

  // Conclusion: P_1 <= K (bottom level trivial).
  for (auto& k : level_keys.front()) {
    if (!K.contains(k)) {
      rep.failure = "ConclusionFails: P_1 not contained in [P,P]";
      return rep;
    }
  }
  rep.pass = true;
  return rep;
}

} // namespace kmf
