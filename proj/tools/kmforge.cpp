// kmforge: exact-arithmetic verification toolkit for generalized Cartan
// matrices, rank-2 affine root systems, and their unipotent groups over
// truncated power series.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kmf/gcm.hpp"
#include "kmf/pgroup.hpp"
#include "kmf/rank2.hpp"
#include "kmf/report.hpp"
#include "kmf/roots.hpp"

using namespace kmf;
using nlohmann::ordered_json;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

RootVec parse_vec(const std::string& s) {
  RootVec v;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      v.push_back(std::stoll(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) v.push_back(std::stoll(cur));
  if (v.empty()) throw Error("UsageError", "expected a comma-separated integer vector");
  return v;
}

Field make_field(uint64_t q, const std::string& modulus) {
  FieldSpec spec = FieldSpec::from_q(q);
  if (!modulus.empty()) {
    auto coeffs = parse_vec(modulus);
    std::vector<uint64_t> m(coeffs.begin(), coeffs.end());
    spec = FieldSpec::extension(spec.p, m);
  }
  return Field(spec);
}

ordered_json json_vec(const RootVec& v) { return ordered_json(v); }

ordered_json json_word(const WeylWord& w) {
  ordered_json a = ordered_json::array();
  for (auto i : w) a.push_back(i);
  return a;
}

void emit(const ordered_json& j, const std::string& format, const std::string& text) {
  if (format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

int run_classify(const std::string& path, const std::string& format) {
  Gcm A = load_gcm_json(path);
  auto blocks = classify_blocks(A);
  ordered_json j;
  j["name"] = A.name;
  j["blocks"] = ordered_json::array();
  std::string text;
  for (auto& [idx, t] : blocks) {
    ordered_json b;
    b["indices"] = idx;
    b["tag"] = to_string(t.tag);
    if (t.tag == CartanTag::Indefinite) b["hyperbolic"] = t.hyperbolic;
    j["blocks"].push_back(b);
  }
  if (blocks.size() == 1) {
    j["tag"] = to_string(blocks[0].second.tag);
    if (blocks[0].second.tag == CartanTag::Indefinite) j["hyperbolic"] = blocks[0].second.hyperbolic;
    text = to_string(blocks[0].second.tag);
    if (blocks[0].second.tag == CartanTag::Indefinite)
      text += blocks[0].second.hyperbolic ? " (hyperbolic)" : " (non-hyperbolic)";
    text += "\n";
  } else {
    for (auto& [idx, t] : blocks) {
      text += "block {";
      for (size_t k = 0; k < idx.size(); ++k) text += (k ? "," : "") + std::to_string(idx[k]);
      text += "}: " + to_string(t.tag) + "\n";
    }
  }
  emit(j, format, text);
  return 0;
}

int run_roots(const std::string& path, int64_t H, const std::string& format) {
  Gcm A = load_gcm_json(path);
  RootDatum d(A, H);
  auto pos = d.positive_roots();
  ordered_json j;
  j["name"] = A.name;
  j["height"] = H;
  j["count"] = pos.size();
  j["roots"] = ordered_json::array();
  std::string text = std::to_string(pos.size()) + " positive roots up to height " + std::to_string(H) + "\n";
  for (auto& r : pos) {
    const RootEntry& e = d.entry(r);
    ordered_json item;
    item["root"] = json_vec(r);
    item["height"] = height(r);
    item["coroot"] = json_vec(e.coroot);
    item["witness"] = json_word(e.witness);
    item["base"] = e.base;
    j["roots"].push_back(item);
    text += "  " + vec_to_string(r) + "  coroot " + vec_to_string(e.coroot) + "\n";
  }
  emit(j, format, text);
  return 0;
}

int run_prenil(const std::string& path, int64_t H, const std::string& alpha, const std::string& beta,
               int64_t bound, const std::string& format) {
  Gcm A = load_gcm_json(path);
  RootVec a = parse_vec(alpha), b = parse_vec(beta);
  RootDatum d(A, H);
  int64_t big = bound * (std::abs(height(a)) + std::abs(height(b))) + 2;
  RootDatum wide(A, std::max(H, big), 500000);
  bool pren = is_prenilpotent(d, a, b);
  auto cone = cone_roots(wide, a, b, bound);
  ordered_json j;
  j["alpha"] = json_vec(a);
  j["beta"] = json_vec(b);
  j["prenilpotent"] = pren;
  j["cone"] = ordered_json::array();
  std::string text = std::string("prenilpotent: ") + (pren ? "yes" : "no") + "\n";
  for (auto& c : cone) {
    ordered_json item;
    item["m"] = c.m;
    item["n"] = c.n;
    item["root"] = json_vec(c.root);
    j["cone"].push_back(item);
    text += "  cone root " + std::to_string(c.m) + "*alpha + " + std::to_string(c.n) + "*beta = " +
            vec_to_string(c.root) + "\n";
  }
  emit(j, format, text);
  return 0;
}

int run_reduce(const std::string& path, int64_t H, const std::string& gamma, const std::string& jset,
               const std::string& format) {
  Gcm A = load_gcm_json(path);
  RootVec g = parse_vec(gamma);
  RootDatum d(A, H);
  ordered_json j;
  std::string text;
  if (!jset.empty()) {
    std::vector<size_t> J;
    for (auto x : parse_vec(jset)) J.push_back(size_t(x));
    auto r = decompose_over_WJ(d, J, g);
    j["gamma"] = json_vec(g);
    j["J"] = J;
    j["w"] = json_word(r.w);
    j["beta"] = json_vec(r.beta);
    text = "gamma = w(beta) with w = " + json_word(r.w).dump() + ", beta = " + vec_to_string(r.beta) + "\n";
  } else {
    auto r = rank2_reduce(d, g);
    j["gamma"] = json_vec(g);
    j["w"] = json_word(r.w);
    j["i"] = r.i;
    j["j"] = r.j;
    j["alpha"] = json_vec(r.alpha);
    text = "gamma = w(alpha), w = " + json_word(r.w).dump() + ", {i,j} = {" + std::to_string(r.i) + "," +
           std::to_string(r.j) + "}, alpha = " + vec_to_string(r.alpha) + "\n";
  }
  emit(j, format, text);
  return 0;
}

struct VerifyOpts {
  uint64_t q = 5;
  std::string modulus;
  int trunc = 4;
  int64_t height = 8;
  std::vector<std::string> checks = {"span", "congruence", "relations"};
  std::string format = "text";
  uint64_t cap = 2000000;
};

void run_case_checks(RCase c, const VerifyOpts& o, std::vector<Report>& out) {
  Field F = make_field(o.q, o.modulus);
  auto wants = [&](const std::string& name) {
    for (auto& x : o.checks)
      if (x == name) return true;
    return false;
  };
  auto guard = [&](const std::string& check, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == "GateFailed")
        out.push_back(Report::gate_failed(check, to_string(c), e.what()));
      else
        throw;
    }
  };

  if (wants("span") && c != RCase::FiniteA2) {
    guard("span", [&] {
      for (int n = 1; n + 2 <= o.trunc; ++n) {
        auto t0 = std::chrono::steady_clock::now();
        out.push_back(Report::from_check(span_check(c, F, n), ms_since(t0)));
      }
    });
  }
  if (wants("congruence") && c != RCase::FiniteA2) {
    guard("congruence", [&] {
      for (auto& id : congruence_identity_names(c)) {
        for (int n = 1; n + 2 <= o.trunc; ++n) {
          if (!congruence_identity_level_ok(id, n)) continue;
          auto t0 = std::chrono::steady_clock::now();
          out.push_back(Report::from_check(congruence_identity_check(c, F, id, n), ms_since(t0)));
        }
      }
    });
  }
  if (wants("relations")) {
    guard("relations", [&] {
      Realization real(c, F, c == RCase::FiniteA2 ? 1 : o.trunc);
      auto t0 = std::chrono::steady_clock::now();
      for (auto& g : real.generator_roots()) {
        if (height(g) > o.height) continue;
        t0 = std::chrono::steady_clock::now();
        out.push_back(Report::from_check(relation_r1_check(real, g), ms_since(t0)));
        for (size_t i = 1; i <= 2; ++i) {
          t0 = std::chrono::steady_clock::now();
          out.push_back(Report::from_check(relation_r4_check(real, g, i), ms_since(t0)));
        }
      }
      for (size_t i = 1; i <= 2; ++i) {
        t0 = std::chrono::steady_clock::now();
        out.push_back(Report::from_check(commutator_lemma_check(real, i), ms_since(t0)));
      }
      // R2 over prenilpotent ordered pairs of modest height
      int64_t hcap = std::min<int64_t>(o.height, 6);
      RootDatum datum(case_gcm(c), 12 * 2 * hcap + 4, 500000);
      auto pos = datum.positive_roots();
      for (auto& a : pos) {
        if (height(a) > hcap || !real.realizes(a)) continue;
        for (auto& b : pos) {
          if (a == b || height(b) > hcap || !real.realizes(b)) continue;
          if (!is_prenilpotent(datum, a, b)) continue;
          t0 = std::chrono::steady_clock::now();
          out.push_back(Report::from_check(relation_r2_check(real, datum, a, b).report, ms_since(t0)));
        }
      }
    });
  }
  if (wants("wellbehaved")) {
    guard("wellbehaved", [&] {
      int N = c == RCase::FiniteA2 ? 1 : o.trunc;
      auto t0 = std::chrono::steady_clock::now();
      out.push_back(Report::from_check(well_behaved_at_level(c, F, N, o.height, o.cap).report, ms_since(t0)));
    });
  }
  if (wants("density") && c == RCase::Twisted) {
    guard("density", [&] {
      auto t0 = std::chrono::steady_clock::now();
      out.push_back(Report::from_check(density_check(F, std::min(o.trunc, 3), o.cap).report, ms_since(t0)));
    });
  }
}

int run_verify(const std::string& which, const VerifyOpts& o) {
  std::vector<Report> reports;
  std::vector<RCase> cases;
  if (which == "all")
    cases = {RCase::NonTwisted, RCase::Twisted, RCase::FiniteA2};
  else
    cases = {rcase_from_string(which)};
  for (auto c : cases) run_case_checks(c, o, reports);
  if (o.format == "json") {
    std::cout << reports_to_json(reports) << "\n";
  } else {
    for (auto& r : reports) std::cout << r.to_text() << "\n";
  }
  return exit_code_for(reports);
}

int run_pgroup_demo(const std::string& which, uint64_t q, int N, uint64_t cap, const std::string& format) {
  Field F = make_field(q, "");
  std::vector<SMat> gens;
  int dim = 3;
  if (which == "heisenberg") {
    N = 1;
    gens = {smat_elementary(F, 3, 1, 0, 1, F.one(), 0), smat_elementary(F, 3, 1, 1, 2, F.one(), 0)};
  } else {
    RCase c = rcase_from_string(which);
    Realization real(c, F, N);
    dim = real.dim();
    for (auto& g : real.generator_roots())
      for (auto u : F.basis_elements()) gens.push_back(real.chi(g, u));
  }
  auto t0 = std::chrono::steady_clock::now();
  FinGroup G = closure(F, dim, N, gens, cap);
  FinGroup D = derived_subgroup(G, cap);
  FinGroup S = frattini_star(G, cap);
  ordered_json j;
  j["which"] = which;
  j["q"] = q;
  j["trunc"] = N;
  j["order"] = G.order();
  j["derived_order"] = D.order();
  j["frattini_index"] = G.order() / S.order();
  j["timings_ms"] = ms_since(t0);
  std::string text = "order " + std::to_string(G.order()) + ", derived subgroup order " +
                     std::to_string(D.order()) + ", Frattini index " +
                     std::to_string(G.order() / S.order()) + "\n";
  emit(j, format, text);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"kmforge: exact verification of rank-2 Kac-Moody unipotent groups"};
  app.require_subcommand(1);

  std::string gcm_path, format = "text";
  int64_t H = 8;

  auto* classify_cmd = app.add_subcommand("classify", "classify a generalized Cartan matrix");
  classify_cmd->add_option("gcm", gcm_path, "GCM JSON file")->required();
  classify_cmd->add_option("--format", format, "json|text");

  auto* roots_cmd = app.add_subcommand("roots", "enumerate real roots up to a height bound");
  roots_cmd->add_option("gcm", gcm_path, "GCM JSON file")->required();
  roots_cmd->add_option("--height", H, "height horizon");
  roots_cmd->add_option("--format", format, "json|text");

  std::string alpha, beta, gamma, jset;
  int64_t bound = 12;
  auto* prenil_cmd = app.add_subcommand("prenil", "prenilpotency decision and cone roots");
  prenil_cmd->add_option("gcm", gcm_path)->required();
  prenil_cmd->add_option("--height", H, "height horizon");
  prenil_cmd->add_option("--alpha", alpha, "root, e.g. 1,0")->required();
  prenil_cmd->add_option("--beta", beta, "root, e.g. 0,1")->required();
  prenil_cmd->add_option("--bound", bound, "cone search bound");
  prenil_cmd->add_option("--format", format, "json|text");

  auto* reduce_cmd = app.add_subcommand("reduce", "height-descent reductions");
  reduce_cmd->add_option("gcm", gcm_path)->required();
  reduce_cmd->add_option("--height", H, "height horizon");
  reduce_cmd->add_option("--gamma", gamma, "positive root to reduce")->required();
  reduce_cmd->add_option("--j", jset, "subset J (1-based): run the W_J decomposition");
  reduce_cmd->add_option("--format", format, "json|text");

  VerifyOpts vo;
  std::string which;
  auto* verify_cmd = app.add_subcommand("verify", "run the verification suites");
  verify_cmd->add_option("case", which, "case1|case2|a2|all")->required();
  verify_cmd->add_option("--field", vo.q, "field size q");
  verify_cmd->add_option("--modulus", vo.modulus, "modulus coefficients c0,c1,...,1");
  verify_cmd->add_option("--trunc", vo.trunc, "truncation level N");
  verify_cmd->add_option("--height", vo.height, "root height bound H");
  verify_cmd->add_option("--checks", vo.checks, "span,congruence,relations,wellbehaved,density")
      ->delimiter(',');
  verify_cmd->add_option("--format", vo.format, "json|text");
  verify_cmd->add_option("--cap", vo.cap, "group closure cap");

  auto* pgroup_cmd = app.add_subcommand("pgroup", "finite p-group diagnostics");
  std::string demo_which = "heisenberg";
  uint64_t pq = 5;
  int pN = 3;
  uint64_t pcap = 2000000;
  auto* demo_cmd = pgroup_cmd->add_subcommand("demo", "closure/derived/Frattini summary");
  demo_cmd->add_option("--which", demo_which, "heisenberg|case1|case2");
  demo_cmd->add_option("--field", pq, "field size q");
  demo_cmd->add_option("--trunc", pN, "truncation level N");
  demo_cmd->add_option("--cap", pcap, "closure cap");
  demo_cmd->add_option("--format", format, "json|text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2; // usage errors exit 2; --help exits 0
  }

  try {
    if (*classify_cmd) return run_classify(gcm_path, format);
    if (*roots_cmd) return run_roots(gcm_path, H, format);
    if (*prenil_cmd) return run_prenil(gcm_path, H, alpha, beta, bound, format);
    if (*reduce_cmd) return run_reduce(gcm_path, H, gamma, jset, format);
    if (*verify_cmd) return run_verify(which, vo);
    if (*pgroup_cmd) {
      if (*demo_cmd) return run_pgroup_demo(demo_which, pq, pN, pcap, format);
      std::cerr << "pgroup requires the 'demo' subcommand\n";
      return 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
