#include "kmf/roots.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace kmf {

namespace {
inline int64_t iabs64(int64_t x) { return x < 0 ? -x : x; }
} // namespace


int64_t height(const RootVec& v) {
  int64_t h = 0;
  for (auto x : v) h += x;
  return h;
}

bool is_positive_root_vec(const RootVec& v) {
  bool nonzero = false;
  for (auto x : v) {
    if (x < 0) return false;
    if (x > 0) nonzero = true;
  }
  return nonzero;
}

bool is_negative_root_vec(const RootVec& v) {
  bool nonzero = false;
  for (auto x : v) {
    if (x > 0) return false;
    if (x < 0) nonzero = true;
  }
  return nonzero;
}

std::string vec_to_string(const RootVec& v) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

RootVec reflect(const Gcm& A, size_t i, const RootVec& alpha) {
  if (i < 1 || i > A.rank()) throw Error("IndexOutOfRange", "reflection index " + std::to_string(i));
  int64_t c = 0; // <alpha, alpha_i^vee> = sum_j n_j a_ij
  for (size_t j = 0; j < A.rank(); ++j) c += alpha[j] * A(i - 1, j);
  RootVec out = alpha;
  out[i - 1] -= c;
  return out;
}

CorootVec reflect_coroot(const Gcm& A, size_t i, const CorootVec& h) {
  if (i < 1 || i > A.rank()) throw Error("IndexOutOfRange", "reflection index " + std::to_string(i));
  int64_t c = 0; // <alpha_i, h> = sum_j m_j a_ji
  for (size_t j = 0; j < A.rank(); ++j) c += h[j] * A(j, i - 1);
  CorootVec out = h;
  out[i - 1] -= c;
  return out;
}

RootVec apply_word(const Gcm& A, const WeylWord& w, RootVec alpha) {
  for (size_t k = w.size(); k-- > 0;) alpha = reflect(A, w[k], alpha);
  return alpha;
}

CorootVec apply_word_coroot(const Gcm& A, const WeylWord& w, CorootVec h) {
  for (size_t k = w.size(); k-- > 0;) h = reflect_coroot(A, w[k], h);
  return h;
}

int64_t pairing(const Gcm& A, const RootVec& alpha, const CorootVec& h) {
  int64_t s = 0;
  for (size_t i = 0; i < A.rank(); ++i)
    for (size_t j = 0; j < A.rank(); ++j) s += h[i] * A(i, j) * alpha[j];
  return s;
}

int64_t invariant_form(const Gcm& A, const RootVec& alpha, const RootVec& beta) {
  if (!A.symmetric()) throw Error("NotSymmetric", "invariant form needs a symmetric GCM");
  int64_t s = 0;
  for (size_t i = 0; i < A.rank(); ++i)
    for (size_t j = 0; j < A.rank(); ++j) s += alpha[i] * A(i, j) * beta[j];
  return s;
}

RootDatum::RootDatum(Gcm A, int64_t horizon, size_t root_cap) : A_(std::move(A)), horizon_(horizon) {
  if (horizon_ < 1) throw Error("BadHorizon", "height horizon must be >= 1");
  size_t l = A_.rank();

  // BFS closure of the simple roots under all reflections. Reflections can
  // overshoot the horizon and come back, so expansion runs inside a slack
  // band |height| <= H + slack with slack = max|a_ij| * H, then the stored
  // set is filtered back to |height| <= H.
  int64_t maxa = 1;
  for (size_t i = 0; i < l; ++i)
    for (size_t j = 0; j < l; ++j) maxa = std::max(maxa, iabs64(A_(i, j)));
  int64_t band = horizon_ + maxa * horizon_;

  std::map<RootVec, RootEntry> found;
  std::deque<RootVec> queue;
  for (size_t i = 1; i <= l; ++i) {
    RootVec alpha(l, 0);
    alpha[i - 1] = 1;
    CorootVec h(l, 0);
    h[i - 1] = 1;
    found.emplace(alpha, RootEntry{alpha, h, {}, i});
    queue.push_back(alpha);
  }
  while (!queue.empty()) {
    RootVec alpha = queue.front();
    queue.pop_front();
    const RootEntry cur = found.at(alpha);
    for (size_t i = 1; i <= l; ++i) {
      RootVec beta = reflect(A_, i, alpha);
      if (iabs64(height(beta)) > band) continue;
      if (found.count(beta)) continue;
      RootEntry e;
      e.alpha = beta;
      e.coroot = reflect_coroot(A_, i, cur.coroot);
      e.witness = cur.witness;
      e.witness.insert(e.witness.begin(), i);
      e.base = cur.base;
      found.emplace(beta, std::move(e));
      queue.push_back(beta);
      if (found.size() > root_cap)
        throw Error("HorizonTooLarge", "root enumeration exceeded cap of " + std::to_string(root_cap));
    }
  }
  for (auto& [v, e] : found) {
    if (iabs64(height(v)) <= horizon_) {
      index_.emplace(v, roots_.size());
      roots_.push_back(e);
    }
  }
}

bool RootDatum::contains(const RootVec& v) const { return index_.count(v) > 0; }

const RootEntry& RootDatum::entry(const RootVec& v) const {
  auto it = index_.find(v);
  if (it == index_.end())
    throw Error("NotARealRoot", vec_to_string(v) + " is not a stored real root (horizon " +
                                    std::to_string(horizon_) + ")");
  return roots_[it->second];
}

std::vector<RootVec> RootDatum::positive_roots() const {
  std::vector<RootVec> out;
  for (auto& e : roots_)
    if (is_positive_root_vec(e.alpha)) out.push_back(e.alpha);
  std::sort(out.begin(), out.end(), [](const RootVec& a, const RootVec& b) {
    int64_t ha = height(a), hb = height(b);
    if (ha != hb) return ha < hb;
    return a < b;
  });
  return out;
}

RootDatum enumerate_real_roots(const Gcm& A, int64_t H, size_t root_cap) {
  return RootDatum(A, H, root_cap);
}

bool is_prenilpotent(const RootDatum& datum, const RootVec& a, const RootVec& b) {
  const RootEntry& ea = datum.entry(a);
  const RootEntry& eb = datum.entry(b);
  RootVec neg(b.size());
  for (size_t i = 0; i < b.size(); ++i) neg[i] = -b[i];
  if (a == neg) return false;
  if (a == b) return true;
  int64_t p = pairing(datum.matrix(), a, eb.coroot);
  int64_t q = pairing(datum.matrix(), b, ea.coroot);
  if (p >= 0) return true;
  if (p * q <= 3) return true;
  return false; // p <= -1 and pq >= 4: the reflection orbit fills the cone
}

std::vector<ConeRoot> cone_roots(const RootDatum& datum, const RootVec& a, const RootVec& b,
                                 int64_t bound) {
  if (bound < 1) throw Error("BadBound", "cone bound must be >= 1");
  std::vector<ConeRoot> out;
  size_t l = a.size();
  for (int64_t m = 1; m <= bound; ++m) {
    for (int64_t n = 1; n <= bound; ++n) {
      RootVec v(l);
      bool zero = true;
      for (size_t i = 0; i < l; ++i) {
        v[i] = m * a[i] + n * b[i];
        if (v[i] != 0) zero = false;
      }
      if (zero) continue;
      if (iabs64(height(v)) > datum.horizon())
        throw Error("HorizonExceeded", "cone candidate " + vec_to_string(v) + " has height beyond horizon " +
                                           std::to_string(datum.horizon()));
      if (datum.contains(v)) out.push_back({m, n, v});
    }
  }
  return out;
}

namespace {

bool supported_on(const RootVec& v, const std::vector<size_t>& J) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    if (std::find(J.begin(), J.end(), i + 1) == J.end()) return false;
  }
  return true;
}

} // namespace

WJDecomposition decompose_over_WJ(const RootDatum& datum, const std::vector<size_t>& J,
                                  const RootVec& gamma) {
  const Gcm& A = datum.matrix();
  for (size_t j : J)
    if (j < 1 || j > A.rank()) throw Error("IndexOutOfRange", "J contains " + std::to_string(j));
  datum.entry(gamma);
  if (!is_positive_root_vec(gamma)) throw Error("NotPositive", vec_to_string(gamma) + " is not positive");
  if (supported_on(gamma, J))
    throw Error("GammaInPhiJ", vec_to_string(gamma) + " lies in the rank-|J| subsystem");

  // Paper-style descent: while some <gamma, alpha_j^vee> > 0 with j in J,
  // replace gamma by w_j(gamma); heights strictly decrease, so this ends in
  // Psi_J. Smallest valid j is taken for determinism.
  WeylWord w;
  RootVec cur = gamma;
  for (;;) {
    std::optional<size_t> step;
    for (size_t j : J) {
      CorootVec cv(A.rank(), 0);
      cv[j - 1] = 1;
      if (pairing(A, cur, cv) > 0) {
        if (!step || j < *step) step = j;
      }
    }
    if (!step) break;
    cur = reflect(A, *step, cur);
    w.push_back(*step);
    if (iabs64(height(cur)) > datum.horizon())
      throw Error("HorizonExceeded", "descent left the horizon"); // heights only decrease; unreachable
  }
  return {w, cur};
}

Rank2Reduction rank2_reduce(const RootDatum& datum, const RootVec& gamma) {
  const Gcm& A = datum.matrix();
  datum.entry(gamma);
  if (!is_positive_root_vec(gamma)) throw Error("NotPositive", vec_to_string(gamma) + " is not positive");
  if (height(gamma) == 1) throw Error("SimpleRoot", vec_to_string(gamma) + " is simple");

  std::vector<size_t> support;
  for (size_t i = 0; i < gamma.size(); ++i)
    if (gamma[i] != 0) support.push_back(i + 1);

  if (support.size() <= 2) {
    size_t i = support[0];
    size_t j = support.size() == 2 ? support[1] : (i == 1 ? 2 : 1);
    return {WeylWord{}, i, j, gamma};
  }

  // Inductive step: pick the smallest k with <gamma, alpha_k^vee> > 0 (one
  // exists since <gamma, gamma^vee> = 2), recurse on the shorter root
  // w_k(gamma), then patch the collision w(alpha_i) = alpha_k if it occurs.
  std::optional<size_t> k;
  for (size_t c = 1; c <= A.rank() && !k; ++c) {
    CorootVec cv(A.rank(), 0);
    cv[c - 1] = 1;
    if (pairing(A, gamma, cv) > 0) k = c;
  }
  if (!k) throw Error("NotARealRoot", "no descent index; input is not a real root");

  RootVec shorter = reflect(A, *k, gamma);
  Rank2Reduction sub = rank2_reduce(datum, shorter);

  RootVec simple_i(A.rank(), 0), simple_j(A.rank(), 0);
  simple_i[sub.i - 1] = 1;
  simple_j[sub.j - 1] = 1;
  RootVec wi = apply_word(A, sub.w, simple_i);
  RootVec wj = apply_word(A, sub.w, simple_j);
  RootVec alpha_k(A.rank(), 0);
  alpha_k[*k - 1] = 1;

  WeylWord prepended = sub.w;
  prepended.insert(prepended.begin(), *k);
  RootVec wk_wi = reflect(A, *k, wi);
  RootVec wk_wj = reflect(A, *k, wj);
  if (is_positive_root_vec(wk_wi) && is_positive_root_vec(wk_wj))
    return {prepended, sub.i, sub.j, sub.alpha};

  // One of w(alpha_i), w(alpha_j) equals alpha_k; normalize to the i slot.
  size_t ii = sub.i, jj = sub.j;
  if (wj == alpha_k) std::swap(ii, jj);
  RootVec patched = reflect(A, ii, sub.alpha);
  return {sub.w, sub.i, sub.j, patched};
}

} // namespace kmf
