#include "synfix/intersection.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include <omp.h>

namespace synfix {

ParseChart::ParseChart(std::size_t num_states, std::size_t num_nonterminals)
    : q_(num_states),
      v_(num_nonterminals),
      wv_((num_nonterminals + 63) / 64),
      bits_(num_states * num_states * wv_, 0),
      round_(num_states * num_states * num_nonterminals, kUnset) {}

void ParseChart::set(StateId p, StateId r, NonterminalId v, std::uint8_t round) {
  auto& w = bits_[cell_index(p, r) + (v >> 6)];
  const std::uint64_t m = std::uint64_t{1} << (v & 63);
  if (w & m) return;
  w |= m;
  round_[(p * q_ + r) * v_ + v] = round;
}

bool ParseChart::any(StateId p, StateId r) const {
  for (auto w : cell(p, r))
    if (w) return true;
  return false;
}

std::optional<std::uint8_t> ParseChart::first_round(StateId p, StateId r, NonterminalId v) const {
  if (!get(p, r, v)) return std::nullopt;
  return round_[(p * q_ + r) * v_ + v];
}

std::size_t ParseChart::popcount() const {
  std::size_t n = 0;
  for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::string ParseChart::to_text(std::optional<NonterminalId> v) const {
  std::string out;
  for (StateId p = 0; p < q_; ++p) {
    for (StateId r = 0; r < q_; ++r) {
      const bool on = v ? get(p, r, *v) : any(p, r);
      out += on ? "■" : "□";
    }
    out += '\n';
  }
  return out;
}

std::uint32_t round_bound(std::size_t num_states, std::size_t num_nonterminals) {
  const std::size_t n = std::max<std::size_t>(2, num_states * num_nonterminals);
  return static_cast<std::uint32_t>(std::bit_width(n - 1));
}

namespace {

void require_ordered(const SymbolicNfa& a) {
  if (a.num_states() == 0 || !a.is_ordered())
    throw AutomatonError("automaton must be ordered and acyclic");
}

}  // namespace

ParseChart init_chart(const CnfGrammar& g, const SymbolicNfa& a) {
  require_ordered(a);
  ParseChart chart(a.num_states(), g.num_nonterminals());
  for (const auto& arc : a.arcs()) {
    switch (arc.pred.kind) {
      case Predicate::Kind::Equals:
        if (arc.pred.token < g.num_terminals())
          for (auto w : g.producers(arc.pred.token)) chart.set(arc.src, arc.dst, w, 0);
        break;
      default:
        for (const auto& u : g.unit_rules())
          if (arc.pred.accepts(u.token)) chart.set(arc.src, arc.dst, u.lhs, 0);
        break;
    }
  }
  return chart;
}

/// Inner loop shared by the kernel, the early-exit decision and the
/// reference: all derivations of (p, r) split at some midpoint.
struct ChartKernel {
  // Joins every admissible midpoint of (p, r) into `acc`.
  static void join(const ParseChart& m, const CnfGrammar& g, const BoolMatrix& reach, StateId p,
                   StateId r, std::uint64_t* acc) {
    const std::size_t wv = m.wv_;
    for (StateId q = p + 1; q < r; ++q) {
      if (!reach.get(p, q) || !reach.get(q, r)) continue;
      const std::uint64_t* left = m.bits_.data() + m.cell_index(p, q);
      const std::uint64_t* right = m.bits_.data() + m.cell_index(q, r);
      bool right_any = false;
      for (std::size_t i = 0; i < wv; ++i) right_any |= right[i] != 0;
      if (!right_any) continue;
      for (std::size_t i = 0; i < wv; ++i) {
        std::uint64_t word = left[i];
        while (word) {
          const auto x = static_cast<NonterminalId>(i * 64 + std::countr_zero(word));
          word &= word - 1;
          for (const auto& [z, w] : g.by_left(x))
            if ((right[z >> 6] >> (z & 63)) & 1u) acc[w >> 6] |= std::uint64_t{1} << (w & 63);
        }
      }
    }
  }

  // Writes acc into (p, r); true if any bit was new.
  static bool merge(ParseChart& m, StateId p, StateId r, const std::uint64_t* acc,
                    std::uint8_t round) {
    std::uint64_t* cell = m.bits_.data() + m.cell_index(p, r);
    bool changed = false;
    for (std::size_t i = 0; i < m.wv_; ++i) {
      std::uint64_t fresh = acc[i] & ~cell[i];
      if (!fresh) continue;
      changed = true;
      cell[i] |= fresh;
      while (fresh) {
        const auto v = static_cast<std::size_t>(i * 64 + std::countr_zero(fresh));
        fresh &= fresh - 1;
        m.round_[(p * m.q_ + r) * m.v_ + v] = round;
      }
    }
    return changed;
  }

  // One anti-diagonal: every (p, p + gap). Returns true if a bit was added.
  static bool level(ParseChart& m, const CnfGrammar& g, const BoolMatrix& reach, std::size_t gap,
                    std::uint8_t round, Exec exec) {
    const std::size_t q = m.q_;
    const auto count = static_cast<std::int64_t>(q - gap);
    bool changed = false;
#pragma omp parallel if (exec == Exec::Parallel && count > 1)
    {
      std::vector<std::uint64_t> acc(m.wv_);
#pragma omp for schedule(dynamic, 4) reduction(|| : changed)
      for (std::int64_t pi = 0; pi < count; ++pi) {
        const auto p = static_cast<StateId>(pi);
        const auto r = static_cast<StateId>(pi + static_cast<std::int64_t>(gap));
        if (!reach.get(p, r)) continue;
        std::fill(acc.begin(), acc.end(), 0);
        join(m, g, reach, p, r, acc.data());
        if (merge(m, p, r, acc.data(), round)) changed = true;
      }
    }
    return changed;
  }
};

ParseChart cfl_fixpt(const CnfGrammar& g, const SymbolicNfa& a, Exec exec, FixpointStats* stats) {
  ParseChart m = init_chart(g, a);
  const BoolMatrix reach = strict_reachability(adjacency(a));
  FixpointStats st;
  while (true) {
    ++st.passes;
    bool changed = false;
    const auto round = static_cast<std::uint8_t>(std::min<std::uint32_t>(st.rounds + 1, 254));
    for (std::size_t gap = 2; gap < m.num_states(); ++gap) {
      ++st.levels;
      changed |= ChartKernel::level(m, g, reach, gap, round, exec);
    }
    if (!changed) break;
    ++st.rounds;
  }
  if (stats) *stats = st;
  return m;
}

ParseChart cfl_fixpt_reference(const CnfGrammar& g, const SymbolicNfa& a, FixpointStats* stats) {
  ParseChart m = init_chart(g, a);
  const BoolMatrix reach = strict_reachability(adjacency(a));
  const std::size_t n = m.num_states();
  FixpointStats st;
  bool changed = true;
  while (changed) {
    changed = false;
    ++st.passes;
    const auto round = static_cast<std::uint8_t>(std::min<std::uint32_t>(st.rounds + 1, 254));
    for (StateId p = 0; p < n; ++p) {
      for (StateId r = p + 1; r < n; ++r) {
        if (!reach.get(p, r)) continue;
        for (StateId q = p + 1; q < r; ++q) {
          for (const auto& rule : g.binary_rules()) {
            if (m.get(p, r, rule.lhs)) continue;
            if (m.get(p, q, rule.left) && m.get(q, r, rule.right)) {
              m.set(p, r, rule.lhs, round);
              changed = true;
            }
          }
        }
      }
    }
    if (changed) ++st.rounds;
  }
  if (stats) *stats = st;
  return m;
}

bool nonempty(const ParseChart& chart, const SymbolicNfa& a, const CnfGrammar& g) {
  for (auto f : a.finals())
    if (chart.get(a.initial(), f, g.start())) return true;
  return false;
}

bool decide_early(const CnfGrammar& g, const SymbolicNfa& a, FixpointStats* stats) {
  ParseChart m = init_chart(g, a);
  const BoolMatrix reach = strict_reachability(adjacency(a));
  FixpointStats st;
  bool found = nonempty(m, a, g);
  if (!found) {
    ++st.passes;
    bool changed = false;
    for (std::size_t gap = 2; gap < m.num_states() && !found; ++gap) {
      ++st.levels;
      changed |= ChartKernel::level(m, g, reach, gap, 1, Exec::Sequential);
      found = nonempty(m, a, g);
    }
    if (changed) ++st.rounds;
  }
  if (stats) *stats = st;
  return found;
}

Gre reg_build(GreArena& arena, const ParseChart& chart, const CnfGrammar& g, const SymbolicNfa& a,
              GreChart* out) {
  if (!nonempty(chart, a, g)) throw IntersectionError("reg_build: the intersection is empty");
  const std::size_t n = chart.num_states();
  const std::size_t nv = g.num_nonterminals();
  GreChart e(n, nv);

  // Leaves: per (p, r, v) the union of tokens over all arcs p → r.
  std::map<std::pair<StateId, StateId>, std::vector<std::vector<TokenId>>> leaf_tokens;
  for (const auto& arc : a.arcs()) {
    auto& per_v = leaf_tokens[{arc.src, arc.dst}];
    if (per_v.empty()) per_v.resize(nv);
    for (const auto& u : g.unit_rules())
      if (arc.pred.accepts(u.token)) per_v[u.lhs].push_back(u.token);
  }
  for (auto& [pr, per_v] : leaf_tokens)
    for (NonterminalId v = 0; v < nv; ++v)
      if (!per_v[v].empty()) e.put(pr.first, pr.second, v, arena.atoms(per_v[v]));

  std::vector<Gre> terms;
  for (std::size_t gap = 2; gap < n; ++gap) {
    for (StateId p = 0; p + gap < n; ++p) {
      const auto r = static_cast<StateId>(p + gap);
      if (!chart.any(p, r)) continue;
      // Midpoints whose both halves parse as something.
      std::vector<StateId> mids;
      for (StateId q = p + 1; q < r; ++q)
        if (chart.any(p, q) && chart.any(q, r)) mids.push_back(q);
      for (NonterminalId v = 0; v < nv; ++v) {
        if (!chart.get(p, r, v)) continue;
        terms.clear();
        if (Gre leaf = e.at(p, r, v); leaf != arena.empty()) terms.push_back(leaf);
        for (auto q : mids) {
          for (const auto& [x, z] : g.by_lhs(v)) {
            if (!chart.get(p, q, x) || !chart.get(q, r, z)) continue;
            terms.push_back(arena.cat(e.at(p, q, x), e.at(q, r, z)));
          }
        }
        e.put(p, r, v, arena.alt_all(terms));
      }
    }
  }

  terms.clear();
  for (auto f : a.finals()) {
    Gre t = e.at(a.initial(), f, g.start());
    if (t != arena.empty()) terms.push_back(t);
  }
  Gre result = arena.alt_all(terms);
  if (out) *out = std::move(e);
  return result;
}

std::optional<Cfg> salomaa_intersect(const CnfGrammar& g, const SymbolicNfa& a) {
  const SymbolicNfa c = concretize(a, g.num_terminals());
  const std::size_t nq = c.num_states();
  const std::size_t nv = g.num_nonterminals();
  auto id = [&](StateId p, NonterminalId v, StateId r) { return (p * nv + v) * nq + r; };

  // Generating triples, found by a worklist over the ⋈ rules; the ↑ rules
  // seed it.
  std::vector<bool> gen(nq * nv * nq, false);
  std::vector<std::tuple<StateId, NonterminalId, StateId>> work;
  std::vector<std::tuple<std::size_t, TokenId>> unit_prods;  // triple, token
  for (const auto& arc : c.arcs()) {
    const TokenId t = arc.pred.token;
    for (auto w : g.producers(t)) {
      unit_prods.emplace_back(id(arc.src, w, arc.dst), t);
      if (!gen[id(arc.src, w, arc.dst)]) {
        gen[id(arc.src, w, arc.dst)] = true;
        work.emplace_back(arc.src, w, arc.dst);
      }
    }
  }
  // by_right[z] = (lhs, left) for rules lhs -> left z.
  std::vector<std::vector<std::pair<NonterminalId, NonterminalId>>> by_right(nv);
  for (const auto& rule : g.binary_rules()) by_right[rule.right].emplace_back(rule.lhs, rule.left);
  auto add = [&](StateId p, NonterminalId w, StateId r) {
    if (gen[id(p, w, r)]) return;
    gen[id(p, w, r)] = true;
    work.emplace_back(p, w, r);
  };
  while (!work.empty()) {
    const auto [p, x, q] = work.back();
    work.pop_back();
    // As a left child: (p, x, q)(q, z, r).
    for (const auto& [z, w] : g.by_left(x))
      for (StateId r = 0; r < nq; ++r)
        if (gen[id(q, z, r)]) add(p, w, r);
    // As a right child: (o, y, p)(p, x, q).
    for (const auto& [w, y] : by_right[x])
      for (StateId o = 0; o < nq; ++o)
        if (gen[id(o, y, p)]) add(o, w, q);
  }

  bool any_start = false;
  for (auto f : c.finals()) any_start |= gen[id(c.initial(), g.start(), f)];
  if (!any_start) return std::nullopt;

  // Reachability from the fresh start over generating triples.
  std::vector<bool> reach(gen.size(), false);
  std::vector<std::size_t> stack;
  for (auto f : c.finals()) {
    const auto t = id(c.initial(), g.start(), f);
    if (gen[t] && !reach[t]) {
      reach[t] = true;
      stack.push_back(t);
    }
  }
  auto decode = [&](std::size_t t) {
    const auto r = static_cast<StateId>(t % nq);
    const auto v = static_cast<NonterminalId>((t / nq) % nv);
    const auto p = static_cast<StateId>(t / nq / nv);
    return std::tuple{p, v, r};
  };
  while (!stack.empty()) {
    const auto [p, w, r] = decode(stack.back());
    stack.pop_back();
    for (const auto& [x, z] : g.by_lhs(w))
      for (StateId q = 0; q < nq; ++q)
        if (gen[id(p, x, q)] && gen[id(q, z, r)])
          for (auto t : {id(p, x, q), id(q, z, r)})
            if (!reach[t]) {
              reach[t] = true;
              stack.push_back(t);
            }
  }

  Cfg out;
  out.terminals = g.alphabet();
  out.nonterminals.push_back("S∩");
  std::unordered_map<std::size_t, NonterminalId> index;
  auto nt = [&](std::size_t t) {
    auto [it, fresh] = index.emplace(t, static_cast<NonterminalId>(out.nonterminals.size()));
    if (fresh) {
      const auto [p, v, r] = decode(t);
      out.nonterminals.push_back("[" + std::to_string(p) + "," + g.name(v) + "," +
                                 std::to_string(r) + "]");
    }
    return it->second;
  };
  for (auto f : c.finals()) {
    const auto t = id(c.initial(), g.start(), f);
    if (reach[t]) out.productions.push_back({0, {Symbol{false, nt(t)}}});
  }
  for (std::size_t t = 0; t < reach.size(); ++t) {
    if (!reach[t]) continue;
    const auto [p, w, r] = decode(t);
    for (const auto& [x, z] : g.by_lhs(w))
      for (StateId q = 0; q < nq; ++q)
        if (reach[id(p, x, q)] && reach[id(q, z, r)])
          out.productions.push_back(
              {nt(t), {Symbol{false, nt(id(p, x, q))}, Symbol{false, nt(id(q, z, r))}}});
  }
  std::set<std::pair<std::size_t, TokenId>> seen;
  for (const auto& [t, tok] : unit_prods)
    if (reach[t] && seen.emplace(t, tok).second)
      out.productions.push_back({nt(t), {Symbol{true, tok}}});
  out.start = 0;
  out.validate();
  return out;
}

std::optional<std::uint32_t> led(const CnfGrammar& g, std::span<const TokenId> sigma,
                                 std::uint32_t limit) {
  if (cyk_accepts(g, sigma)) return 0;
  for (std::uint32_t d = 1; d <= limit; ++d)
    if (decide_early(g, lev_build(sigma, d))) return d;
  return std::nullopt;
}

Gre complete(GreArena& arena, const CnfGrammar& g, const PorousSeq& porous) {
  const SymbolicNfa a = template_nfa(porous);
  const ParseChart chart = cfl_fixpt(g, a);
  if (!nonempty(chart, a, g)) return arena.empty();
  return reg_build(arena, chart, g, a);
}

}  // namespace synfix
