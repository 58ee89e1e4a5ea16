// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <omp.h>

#include "oracles.hpp"
#include "generators.hpp"
#include "synfix/builtin.hpp"
#include "synfix/counting.hpp"
#include "synfix/eval.hpp"
#include "synfix/intersection.hpp"
#include "synfix/pipeline.hpp"
#include "synfix/prune.hpp"

using namespace synfix;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

struct Instance {
  CnfGrammar g;
  Cfg src;
  TokenSeq sigma;
  std::uint32_t d;
};

// Random small instance: |V| ≤ 6, |Σ| ≤ 4, |σ| ≤ 8, d ≤ 2. σ is a corrupted
// sample of the grammar when one is available, otherwise random.
std::optional<Instance> random_instance(std::mt19937_64& rng, bool want_invalid) {
  const std::size_t nt = 2 + rng() % 3;
  Cfg src = oracle::random_cnf_shaped(rng, 1 + rng() % 6, nt, 2 + rng() % 7, 2 + rng() % 5);
  std::optional<CnfGrammar> g;
  try {
    g = to_cnf(src);
  } catch (const GrammarError&) {
    return std::nullopt;
  }
  if (g->num_nonterminals() > 6 || g->num_terminals() > 4) return std::nullopt;
  TokenSeq sigma;
  if (rng() % 5 != 0)
    for (int tries = 0; tries < 10 && sigma.empty(); ++tries) sigma = oracle::sample_word(src, rng, 7);
  if (!sigma.empty())
    sigma = oracle::mutate(rng, sigma, 1 + rng() % 2, static_cast<TokenId>(g->num_terminals()));
  if (sigma.empty() || sigma.size() > 8) {
    sigma.clear();
    for (std::size_t i = 0, n = 1 + rng() % 8; i < n; ++i)
      sigma.push_back(static_cast<TokenId>(rng() % g->num_terminals()));
  }
  if (want_invalid && cyk_accepts(*g, sigma)) return std::nullopt;
  return Instance{std::move(*g), std::move(src), std::move(sigma), static_cast<std::uint32_t>(rng() % 3)};
}

template <class F>
std::vector<Instance> instances(std::uint64_t seed, std::size_t n, bool want_invalid, F&& keep) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  while (out.size() < n)
    if (auto inst = random_instance(rng, want_invalid); inst && keep(*inst)) out.push_back(std::move(*inst));
  return out;
}

std::set<TokenSeq> decoded_set(const CnfGrammar& g, const TokenSeq& sigma, std::uint32_t d, bool prune,
                               bool* exhausted) {
  RepairConfig cfg;
  cfg.radius = d;
  cfg.prune = prune;
  cfg.decode.top_k = kUnlimited;
  std::set<TokenSeq> out;
  try {
    const RepairReport r = repair(g, sigma, cfg);
    *exhausted = r.result.exhausted;
    for (const auto& rep : r.result.repairs) out.insert(rep.tokens);
  } catch (const RadiusExhausted&) {
    *exhausted = true;
  }
  return out;
}

std::string str(const TokenSeq& w) {
  std::string s;
  for (auto t : w) s += std::to_string(t) + " ";
  return s;
}

const CnfGrammar& dyck() {
  static const CnfGrammar g = to_cnf(parse_grammar(*builtin_grammar("dyck")));
  return g;
}

// ---------------------------------------------------------------------------

Verdict cnf_normal_form() {
  const CnfGrammar g = to_cnf(parse_grammar("S -> S S | ( S ) | ( )"));
  // The expected normal form, written out by hand.
  const Cfg expected = parse_grammar("S -> Q R | S S | L R\nQ -> L S\nL -> (\nR -> )\n");
  const auto lang = oracle::derive_upto(expected, 8);
  std::size_t checked = 0, accepted = 0;
  for (const auto& w : oracle::all_strings(2, 1, 8)) {
    std::vector<std::string> labels;
    for (auto t : w) labels.push_back(g.alphabet().label(t));
    TokenSeq in_expected;
    for (const auto& l : labels) in_expected.push_back(expected.terminals.id(l));
    const bool a = cyk_accepts(g, w);
    if (a != lang.contains(in_expected) || a != oracle::dyck_balanced(labels))
      return {false, "mismatch on " + g.alphabet().decode(w)};
    ++checked;
    accepted += a;
  }
  if (g.num_nonterminals() != 4 || g.binary_rules().size() != 4 || g.unit_rules().size() != 2)
    return {false, "rule shape differs: " + g.to_string()};
  return {true, std::to_string(checked) + " strings, " + std::to_string(accepted) + " accepted"};
}

Verdict completion_example() {
  const CnfGrammar g = to_cnf(parse_grammar("S -> N O N\nO -> + | ×\nN -> 0 | 1\n"));
  const auto& al = g.alphabet();
  GreArena ar;
  const Gre e = complete(ar, g, parse_porous(al, "1 _ _"));
  const auto words = enumerate_all(ar, e, 1000);
  const std::vector<TokenSeq> expected{al.encode("1 + 0"), al.encode("1 + 1"), al.encode("1 × 0"),
                                       al.encode("1 × 1")};
  std::set<TokenSeq> got(words.begin(), words.end());
  if (got != std::set<TokenSeq>(expected.begin(), expected.end()) || words.size() != 4)
    return {false, std::to_string(words.size()) + " words"};
  return {true, "4 words"};
}

Verdict volume_examples() {
  const auto& g = dyck();
  std::size_t instances = 0;
  for (const auto& sigma : oracle::all_strings(2, 3, 3)) {
    const auto bf = brute_force_repairs(g, sigma, 1);
    if (bf.empty()) continue;
    ++instances;
    const BigNat v = volume(g, sigma, 1);
    if (v != bf.size()) return {false, "volume " + v.str() + " vs " + std::to_string(bf.size())};
  }
  const TokenSeq pinned = g.alphabet().encode("( ( )");
  const auto bf = brute_force_repairs(g, pinned, 1);
  if (bf.size() != 3) return {false, "oracle gives " + std::to_string(bf.size())};
  const BigNat v = volume(g, pinned, 1);
  if (v != 3) return {false, "volume of `( ( )` is " + v.str()};
  return {true, std::to_string(instances) + " three-token instances; `( ( )` has volume 3"};
}

Verdict ambiguity_example() {
  const CnfGrammar g = to_cnf(parse_grammar("S -> L R\nL -> (\nR -> )\n"));
  const TokenSeq sigma = g.alphabet().encode("(");
  const SymbolicNfa a = lev_build(sigma, 2, LevArcs::Unrestricted);
  GreArena ar;
  const Gre e = reg_build(ar, cfl_fixpt(g, a), g, a);
  const BigNat words = count_words(minimize(gre_to_nfa(ar, e, true), g.num_terminals()));
  const BigNat trees = ar.tree_count(e);
  if (words != 1 || trees < 2) return {false, "words " + words.str() + ", trees " + trees.str()};
  if (volume(g, sigma, 2) != 1) return {false, "volume differs"};
  return {true, "1 word, " + trees.str() + " trees"};
}

Verdict oracle_equivalence() {
  std::size_t n = 0, nonempty = 0, words = 0;
  for (const auto& inst : instances(5005, 500, true, [](const Instance&) { return true; })) {
    bool exhausted = false;
    const auto got = decoded_set(inst.g, inst.sigma, inst.d, true, &exhausted);
    const auto want = brute_force_repairs(inst.g, inst.sigma, inst.d);
    if (!exhausted) return {false, "decoding not exhausted on " + str(inst.sigma)};
    if (got != want)
      return {false, "set differs on σ=" + str(inst.sigma) + " d=" + std::to_string(inst.d) + ": " +
                         std::to_string(got.size()) + " vs " + std::to_string(want.size())};
    ++n;
    nonempty += !want.empty();
    words += want.size();
  }
  return {true, std::to_string(n) + " instances (" + std::to_string(nonempty) + " nonempty, " +
                    std::to_string(words) + " repairs)"};
}

Verdict nonemptiness_agreement() {
  std::size_t n = 0, yes = 0;
  for (const auto& inst : instances(6006, 250, false, [](const Instance&) { return true; })) {
    const SymbolicNfa a = lev_build(inst.sigma, inst.d);
    const bool fix = nonempty(cfl_fixpt(inst.g, a), a, inst.g);
    const bool tri = salomaa_intersect(inst.g, a).has_value();
    const bool bf = !brute_force_repairs(inst.g, inst.sigma, inst.d).empty();
    if (fix != tri || fix != bf) return {false, "disagreement on " + str(inst.sigma)};
    ++n;
    yes += fix;
  }
  return {true, std::to_string(n) + " instances, " + std::to_string(yes) + " nonempty"};
}

Verdict counting_bounds() {
  std::size_t n = 0;
  auto check = [&](GreArena& ar, Gre e, std::size_t nt) -> bool {
    const SymbolicNfa nfa = gre_to_nfa(ar, e, true);
    const BigNat words = count_words(minimize(nfa, nt));
    const BigNat paths = count_paths(nfa, nt);
    ++n;
    return words <= paths && paths <= ar.tree_count(e);
  };
  for (const auto& inst : instances(7007, 200, false, [](const Instance&) { return true; })) {
    const SymbolicNfa a = lev_build(inst.sigma, inst.d);
    const ParseChart m = cfl_fixpt(inst.g, a);
    if (!nonempty(m, a, inst.g)) continue;
    GreArena ar;
    const Gre e = reg_build(ar, m, inst.g, a);
    if (!check(ar, e, inst.g.num_terminals())) return {false, "violation on " + str(inst.sigma)};
  }
  std::mt19937_64 rng(77);
  for (int it = 0; it < 200; ++it) {
    GreArena ar;
    const TokenId nt = 2 + rng() % 3;
    if (!check(ar, gen::random_gre(ar, rng, 4, nt), nt)) return {false, "violation on a random term"};
  }
  return {true, std::to_string(n) + " terms"};
}

Verdict levenshtein_ball() {
  std::size_t automata = 0, checks = 0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (const auto& sigma : oracle::all_strings(2, n, n))
      for (std::uint32_t d = 0; d <= 3; ++d) {
        const SymbolicNfa a = lev_build(sigma, d);
        if (a.num_states() != (n + 1) * (d + 1)) return {false, "state count"};
        for (const auto& w : oracle::all_strings(2, 0, n + d + 1)) {
          if (nfa_accepts(a, w) != (oracle::edit_distance(sigma, w) <= d))
            return {false, "σ=" + str(sigma) + " w=" + str(w)};
          ++checks;
        }
        ++automata;
      }
  return {true, std::to_string(automata) + " automata, " + std::to_string(checks) + " strings"};
}

Verdict pruning_safety() {
  std::size_t n = 0, removed = 0;
  for (const auto& inst : instances(9009, 150, true, [](const Instance& i) { return i.d > 0; })) {
    bool e1 = false, e2 = false;
    const auto pruned = decoded_set(inst.g, inst.sigma, inst.d, true, &e1);
    const auto plain = decoded_set(inst.g, inst.sigma, inst.d, false, &e2);
    if (!e1 || !e2) return {false, "not exhausted"};
    if (pruned != plain) return {false, "sets differ on " + str(inst.sigma)};
    const SymbolicNfa a = lev_build(inst.sigma, inst.d);
    removed += a.num_states() - prune(a, inst.g, inst.sigma).num_states();
    ++n;
  }
  // The bundled bracket grammar exercises the prefix and suffix rules.
  const CnfGrammar g = to_cnf(parse_grammar(*builtin_grammar("brackets")));
  const TokenSeq sigma = g.alphabet().encode("[ ( + ) ]");
  for (std::uint32_t d = 1; d <= 2; ++d) {
    bool e1 = false, e2 = false;
    if (decoded_set(g, sigma, d, true, &e1) != decoded_set(g, sigma, d, false, &e2))
      return {false, "bracket example differs at d=" + std::to_string(d)};
    ++n;
  }
  return {true, std::to_string(n) + " instances, " + std::to_string(removed) + " states removed"};
}

Verdict round_bound_holds() {
  std::size_t n = 0;
  std::uint32_t max_rounds = 0;
  auto check = [&](const CnfGrammar& g, const SymbolicNfa& a) {
    FixpointStats st;
    cfl_fixpt(g, a, Exec::Parallel, &st);
    ++n;
    max_rounds = std::max(max_rounds, st.rounds);
    return st.rounds <= round_bound(a.num_states(), g.num_nonterminals());
  };
  for (const auto& inst : instances(1010, 300, false, [](const Instance&) { return true; }))
    if (!check(inst.g, lev_build(inst.sigma, inst.d))) return {false, "bound exceeded on " + str(inst.sigma)};
  const Cfg src = parse_grammar(*builtin_grammar("imperative"));
  const CnfGrammar g = to_cnf(src);
  std::mt19937_64 rng(10);
  for (int done = 0; done < 10;) {
    const TokenSeq w = oracle::sample_word(src, rng, 30, 100000);
    if (w.size() < 10) continue;
    ++done;
    const TokenSeq b = oracle::mutate(rng, w, 2, static_cast<TokenId>(g.num_terminals()));
    if (!check(g, lev_build(b, 2))) return {false, "bound exceeded on an imperative program"};
  }
  return {true, std::to_string(n) + " fixpoints, at most " + std::to_string(max_rounds) + " productive rounds"};
}

Verdict parallel_determinism() {
  std::size_t n = 0;
  for (const auto& inst : instances(1111, 150, false, [](const Instance&) { return true; })) {
    const SymbolicNfa a = lev_build(inst.sigma, inst.d);
    const ParseChart par = cfl_fixpt(inst.g, a, Exec::Parallel);
    if (par != cfl_fixpt(inst.g, a, Exec::Sequential) || par != cfl_fixpt_reference(inst.g, a))
      return {false, "charts differ on " + str(inst.sigma)};
    ++n;
  }
  const CnfGrammar g = to_cnf(parse_grammar(*builtin_grammar("imperative")));
  const TokenSeq sigma = g.alphabet().encode("def NAME ( NAME ) { return NAME + ; } print NAME ( NUM ;");
  const SymbolicNfa a = lev_build(sigma, 2);
  if (cfl_fixpt(g, a, Exec::Parallel) != cfl_fixpt(g, a, Exec::Sequential))
    return {false, "imperative charts differ"};
  ++n;
  return {true, std::to_string(n) + " charts, " + std::to_string(omp_get_max_threads()) + " threads"};
}

Verdict ngram_consistency() {
  std::mt19937_64 rng(1212);
  const std::vector<std::string> toks{"a", "b", "c", "d"};
  double worst_norm = 0, worst_score = 0;
  std::size_t contexts = 0, repairs = 0;
  for (std::size_t order = 2; order <= 4; ++order) {
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 60; ++i) {
      std::vector<std::string> s;
      for (std::size_t k = 0, n = 1 + rng() % 7; k < n; ++k) s.push_back(toks[rng() % toks.size()]);
      corpus.push_back(s);
    }
    NGramModel m = NGramModel::train(corpus, order);
    for (int it = 0; it < 300; ++it) {
      std::vector<NGramModel::Id> ctx;
      for (std::size_t i = 0; i + 1 < order; ++i) ctx.push_back(static_cast<NGramModel::Id>(rng() % m.vocab_size()));
      double sum = 0;
      for (NGramModel::Id s = 0; s < m.vocab_size(); ++s) sum += std::exp(m.logprob(ctx, s));
      worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
      ++contexts;
    }
    const auto ids = m.bind(Alphabet(toks));
    for (int it = 0; it < 50; ++it) {
      GreArena ar;
      const Gre e = gen::random_gre(ar, rng, 4, 4);
      DecodeOptions opts;
      opts.top_k = 100;
      for (const auto& r : reg_dcode(ar, e, m, ids, opts).repairs) {
        std::vector<NGramModel::Id> mid;
        for (auto t : r.tokens) mid.push_back(ids[t]);
        worst_score = std::max(worst_score, std::abs(r.logscore - m.score(mid)));
        ++repairs;
      }
    }
  }
  std::ostringstream os;
  os << contexts << " contexts (max error " << worst_norm << "), " << repairs << " repairs (max error "
     << worst_score << ")";
  return {worst_norm <= 1e-12 && worst_score <= 1e-9, os.str()};
}

Verdict latency_envelope() {
  const Cfg src = parse_grammar(*builtin_grammar("imperative"));
  const CnfGrammar g = to_cnf(src);
  std::mt19937_64 rng(1313);
  double worst = 0;
  std::size_t n = 0, exhausted = 0, max_len = 0;
  while (n < 20) {
    const TokenSeq w = oracle::sample_word(src, rng, 39, 100000);
    if (w.size() < 30) continue;
    const TokenSeq sigma = oracle::mutate(rng, w, 1 + rng() % 2, static_cast<TokenId>(g.num_terminals()));
    if (sigma.size() > 40 || cyk_accepts(g, sigma)) continue;
    RepairConfig cfg;
    cfg.radius = 2;
    cfg.decode.budget = budget_for(std::chrono::milliseconds(10'000));
    const auto t0 = Clock::now();
    const RepairReport r = repair(g, sigma, cfg);
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    worst = std::max(worst, s);
    if (r.result.repairs.empty()) return {false, "no repair for a two-edit corruption"};
    for (const auto& rep : r.result.repairs)
      if (!cyk_accepts(g, rep.tokens) || rep.distance > 2) return {false, "unsound repair"};
    exhausted += r.result.exhausted;
    max_len = std::max(max_len, sigma.size());
    ++n;
  }
  std::ostringstream os;
  os << n << " programs up to " << max_len << " tokens, slowest " << worst << " s, " << exhausted
     << " decoded exhaustively";
  return {worst < 10.0, os.str()};
}

Verdict precision_harness() {
  // Hand-computed fixture: fix ranked 1st, 3rd, 11th and absent.
  const TokenSeq fix{0, 0};
  const std::vector<RepairInstance> four(4, RepairInstance{{1}, fix});
  auto list = [&](std::size_t rank) {
    std::vector<TokenSeq> out;
    for (std::size_t i = 1; i <= 12; ++i) out.push_back(i == rank ? fix : TokenSeq{1, static_cast<TokenId>(i)});
    return out;
  };
  const std::vector<std::vector<TokenSeq>> ranked{list(1), list(3), list(11), list(0)};
  if (precision_at_k(ranked, four, 10) != 0.5 || precision_at_k(ranked, four, 1) != 0.25 ||
      precision_at_k(ranked, four, kUnlimited) != 0.75)
    return {false, "fixture mismatch"};

  // Synthetic dataset with every fix inside the radius.
  std::mt19937_64 rng(1414);
  std::size_t total = 0;
  for (const char* name : {"dyck", "brackets", "arithmetic"}) {
    const Cfg src = parse_grammar(*builtin_grammar(name));
    const CnfGrammar g = to_cnf(src);
    std::vector<RepairInstance> data;
    while (data.size() < 25) {
      const TokenSeq fixed = oracle::sample_word(src, rng, 8);
      if (fixed.empty()) continue;
      const TokenSeq broken = oracle::mutate(rng, fixed, 1 + rng() % 2, static_cast<TokenId>(g.num_terminals()));
      if (broken.empty() || cyk_accepts(g, broken)) continue;
      data.push_back({broken, fixed});
    }
    EvalOptions opts;
    opts.repair.radius = 2;
    opts.repair.decode.top_k = kUnlimited;
    const EvalReport rep = evaluate(g, data, opts);
    std::vector<std::vector<TokenSeq>> lists;
    for (const auto& r : rep.records) lists.push_back(r.ranked);
    const double p = precision_at_k(lists, data, kUnlimited);
    if (p != 1.0) return {false, std::string(name) + ": P@all = " + std::to_string(p)};
    total += data.size();
  }
  return {true, "fixtures exact; P@all = 1 on " + std::to_string(total) + " instances"};
}

struct Criterion {
  const char* name;
  double limit_s;  // 0 = no limit
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  omp_set_num_threads(4);
  const std::vector<Criterion> criteria{
      {"cnf-normal-form", 1, cnf_normal_form},
      {"hole-completion", 1, completion_example},
      {"volume-matches-oracle", 1, volume_examples},
      {"ambiguity-words-vs-trees", 1, ambiguity_example},
      {"decoded-set-equals-brute-force", 600, oracle_equivalence},
      {"nonemptiness-three-way-agreement", 0, nonemptiness_agreement},
      {"counting-bound-chain", 0, counting_bounds},
      {"levenshtein-ball-exact", 0, levenshtein_ball},
      {"pruning-preserves-repairs", 0, pruning_safety},
      {"fixpoint-round-bound", 0, round_bound_holds},
      {"parallel-sequential-identical", 0, parallel_determinism},
      {"ngram-normalized-and-consistent", 0, ngram_consistency},
      {"latency-under-10s", 0, latency_envelope},
      {"precision-harness", 0, precision_harness},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.limit_s > 0 && s >= c.limit_s) {
      v.ok = false;
      v.detail += " (over the " + std::to_string(static_cast<int>(c.limit_s)) + " s limit)";
    }
    std::printf("%s %2zu %-34s %8.3f s  %s\n", v.ok ? "PASS" : "FAIL", i + 1, c.name, s, v.detail.c_str());
    std::fflush(stdout);
    failures += !v.ok;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
