#include "synfix/counting.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "synfix/intersection.hpp"

namespace synfix {

std::optional<StateId> Dfa::step(StateId q, TokenId t) const {
  const auto& row = delta.at(q);
  auto it = std::lower_bound(row.begin(), row.end(), std::pair<TokenId, StateId>{t, 0});
  if (it == row.end() || it->first != t) return std::nullopt;
  return it->second;
}

bool Dfa::accepts(std::span<const TokenId> sigma) const {
  StateId q = initial;
  for (auto t : sigma) {
    auto next = step(q, t);
    if (!next) return false;
    q = *next;
  }
  return finals[q];
}

std::size_t Dfa::num_transitions() const {
  std::size_t n = 0;
  for (const auto& row : delta) n += row.size();
  return n;
}

SymbolicNfa Dfa::to_nfa() const {
  std::vector<Arc> arcs;
  for (StateId q = 0; q < num_states; ++q)
    for (const auto& [t, r] : delta[q]) arcs.push_back({q, Predicate::eq(t), r});
  std::vector<StateId> fs;
  for (StateId q = 0; q < num_states; ++q)
    if (finals[q]) fs.push_back(q);
  return SymbolicNfa(num_states, std::move(arcs), initial, std::move(fs));
}

namespace {

struct Fragment {
  StateId init;
  std::vector<StateId> finals;
};

class NfaBuilder {
 public:
  NfaBuilder(GreArena& arena, bool merge_or, std::size_t max_states)
      : arena_(arena), merge_or_(merge_or), max_states_(max_states) {}

  SymbolicNfa run(Gre e) {
    Fragment f = build(e);
    std::vector<Arc> arcs;
    for (StateId q = 0; q < out_.size(); ++q)
      for (const auto& [t, r] : out_[q]) arcs.push_back({q, Predicate::eq(t), resolve(r)});
    std::vector<StateId> finals;
    for (auto q : f.finals) finals.push_back(resolve(q));
    return order_states(
        SymbolicNfa(out_.size(), std::move(arcs), f.init, std::move(finals)));
  }

 private:
  StateId fresh() {
    if (out_.size() >= max_states_) throw CountingError("gre_to_nfa: state limit exceeded");
    out_.emplace_back();
    alias_.push_back(static_cast<StateId>(alias_.size()));
    return static_cast<StateId>(out_.size() - 1);
  }

  StateId resolve(StateId q) {
    while (alias_[q] != q) {
      alias_[q] = alias_[alias_[q]];
      q = alias_[q];
    }
    return q;
  }

  void copy_arcs(StateId from, StateId to) {
    arcs_ += out_[from].size();
    if (arcs_ > 4 * max_states_) throw CountingError("gre_to_nfa: arc limit exceeded");
    const auto row = out_[from];
    auto& dst = out_[to];
    dst.insert(dst.end(), row.begin(), row.end());
  }

  Fragment build(Gre e) {
    switch (arena_.kind(e)) {
      case GreKind::Empty: throw CountingError("gre_to_nfa: term contains ∅");
      case GreKind::Epsilon: throw CountingError("gre_to_nfa: term contains ε");
      case GreKind::And: throw CountingError("gre_to_nfa: term contains ∧");
      case GreKind::Atoms: {
        const StateId a = fresh();
        const StateId w = fresh();
        for (auto t : arena_.tokens(e)) out_[a].emplace_back(t, w);
        arcs_ += arena_.tokens(e).size();
        return {a, {w}};
      }
      case GreKind::Cat: {
        Fragment x = build(arena_.left(e));
        Fragment z = build(arena_.right(e));
        // The initial state of z has no incoming arcs; its role passes to
        // every final of x.
        for (auto f : x.finals) copy_arcs(z.init, resolve(f));
        return {x.init, std::move(z.finals)};
      }
      case GreKind::Or: {
        Fragment x = build(arena_.left(e));
        Fragment z = build(arena_.right(e));
        const StateId a = fresh();
        copy_arcs(x.init, a);
        copy_arcs(z.init, a);
        std::vector<StateId> finals = std::move(x.finals);
        finals.insert(finals.end(), z.finals.begin(), z.finals.end());
        if (!merge_or_) return {a, std::move(finals)};
        // Finals have no outgoing arcs, so merging them is a renaming.
        const StateId w = fresh();
        for (auto f : finals) alias_[resolve(f)] = w;
        return {a, {w}};
      }
    }
    throw CountingError("gre_to_nfa: unknown node");
  }

  GreArena& arena_;
  bool merge_or_;
  std::size_t max_states_;
  std::size_t arcs_ = 0;
  std::vector<std::vector<std::pair<TokenId, StateId>>> out_;
  std::vector<StateId> alias_;
};

}  // namespace

SymbolicNfa gre_to_nfa(GreArena& arena, Gre e, bool merge_or, std::size_t max_states) {
  return NfaBuilder(arena, merge_or, max_states).run(e);
}

Dfa determinize(const SymbolicNfa& a, std::size_t alphabet_size) {
  const SymbolicNfa c = concretize(a, alphabet_size);
  std::vector<std::vector<std::pair<TokenId, StateId>>> succ(c.num_states());
  for (const auto& arc : c.arcs()) succ[arc.src].emplace_back(arc.pred.token, arc.dst);

  Dfa d;
  std::map<std::vector<StateId>, StateId> index;
  std::vector<std::vector<StateId>> subsets{{c.initial()}};
  index.emplace(subsets[0], 0);
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    std::map<TokenId, std::vector<StateId>> moves;
    bool fin = false;
    for (auto q : subsets[k]) {
      fin |= c.is_final(q);
      for (const auto& [t, r] : succ[q]) moves[t].push_back(r);
    }
    d.finals.push_back(fin);
    d.delta.emplace_back();
    for (auto& [t, targets] : moves) {
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      auto [it, fresh] = index.emplace(targets, static_cast<StateId>(subsets.size()));
      if (fresh) subsets.push_back(targets);
      d.delta[k].emplace_back(t, it->second);
    }
  }
  d.num_states = subsets.size();
  d.initial = 0;
  return d;
}

SymbolicNfa reverse(const SymbolicNfa& a) {
  const auto iota = static_cast<StateId>(a.num_states());
  std::vector<Arc> arcs;
  for (const auto& arc : a.arcs()) {
    arcs.push_back({arc.dst, arc.pred, arc.src});
    if (a.is_final(arc.dst)) arcs.push_back({iota, arc.pred, arc.src});
  }
  std::vector<StateId> finals{a.initial()};
  if (a.is_final(a.initial())) finals.push_back(iota);
  return order_states(SymbolicNfa(a.num_states() + 1, std::move(arcs), iota, std::move(finals)));
}

Dfa minimize(const SymbolicNfa& a, std::size_t alphabet_size) {
  const Dfa once = determinize(reverse(a), alphabet_size);
  return determinize(reverse(once.to_nfa()), alphabet_size);
}

CountMatrix count_matrix(const Dfa& d) {
  CountMatrix m{d.num_states, std::vector<BigNat>(d.num_states * d.num_states)};
  for (StateId q = 0; q < d.num_states; ++q)
    for (const auto& [t, r] : d.delta[q]) m.a[q * d.num_states + r] += 1;
  return m;
}

BigNat count_words(const Dfa& d) {
  // Sparse row-vector form of v ← v·A, which visits only the nonzero
  // entries of A.
  std::vector<BigNat> v(d.num_states), next(d.num_states);
  v[d.initial] = 1;
  BigNat total = 0;
  for (std::size_t i = 0; i <= d.num_states; ++i) {
    bool live = false;
    for (StateId q = 0; q < d.num_states; ++q) {
      if (v[q] == 0) continue;
      live = true;
      if (d.finals[q]) total += v[q];
      for (const auto& [t, r] : d.delta[q]) next[r] += v[q];
    }
    if (!live) return total;
    if (i == d.num_states) break;
    std::swap(v, next);
    for (auto& x : next) x = 0;
  }
  throw CountingError("count_words: automaton has a cycle");
}

BigNat count_paths(const SymbolicNfa& a, std::size_t alphabet_size) {
  const SymbolicNfa o = order_states(a);
  std::vector<BigNat> paths(o.num_states());
  paths[o.initial()] = 1;
  // Arcs are sorted by source, and sources ascend topologically.
  for (const auto& arc : o.arcs()) {
    std::size_t mult = 0;
    switch (arc.pred.kind) {
      case Predicate::Kind::Equals: mult = arc.pred.token < alphabet_size ? 1 : 0; break;
      case Predicate::Kind::NotEquals:
        mult = arc.pred.token < alphabet_size ? alphabet_size - 1 : alphabet_size;
        break;
      case Predicate::Kind::Any: mult = alphabet_size; break;
    }
    if (mult) paths[arc.dst] += paths[arc.src] * mult;
  }
  BigNat total = 0;
  for (auto f : o.finals()) total += paths[f];
  return total;
}

BigNat volume(const CnfGrammar& g, std::span<const TokenId> sigma, std::uint32_t d) {
  const SymbolicNfa a = lev_build(sigma, d);
  const ParseChart chart = cfl_fixpt(g, a);
  if (!nonempty(chart, a, g)) return 0;
  GreArena arena;
  const Gre e = reg_build(arena, chart, g, a);
  return count_words(minimize(gre_to_nfa(arena, e, true), g.num_terminals()));
}

}  // namespace synfix
