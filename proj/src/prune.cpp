#include "synfix/prune.hpp"

#include <algorithm>

#include "synfix/intersection.hpp"

namespace synfix {

SymbolicNfa padded_prefix_nfa(std::span<const TokenId> prefix, std::uint32_t lo, std::uint32_t hi) {
  const auto k = static_cast<StateId>(prefix.size());
  std::vector<Arc> arcs;
  for (StateId i = 0; i < k; ++i) arcs.push_back({i, Predicate::eq(prefix[i]), i + 1});
  for (StateId i = k; i < k + hi; ++i) arcs.push_back({i, Predicate::any(), i + 1});
  std::vector<StateId> finals;
  for (StateId i = k + lo; i <= k + hi; ++i) finals.push_back(i);
  return SymbolicNfa(k + hi + 1, std::move(arcs), 0, std::move(finals));
}

SymbolicNfa padded_suffix_nfa(std::uint32_t lo, std::uint32_t hi, std::span<const TokenId> suffix) {
  const auto m = static_cast<StateId>(suffix.size());
  std::vector<Arc> arcs;
  for (StateId i = 0; i < hi; ++i) arcs.push_back({i, Predicate::any(), i + 1});
  std::vector<StateId> finals;
  if (m == 0) {
    for (StateId i = lo; i <= hi; ++i) finals.push_back(i);
    return SymbolicNfa(hi + 1, std::move(arcs), 0, std::move(finals));
  }
  // Suffix chain occupies states hi+1 .. hi+m.
  for (StateId i = lo; i <= hi; ++i) arcs.push_back({i, Predicate::eq(suffix[0]), hi + 1});
  for (StateId j = 1; j < m; ++j) arcs.push_back({hi + j, Predicate::eq(suffix[j]), hi + j + 1});
  finals.push_back(hi + m);
  return SymbolicNfa(hi + m + 1, std::move(arcs), 0, std::move(finals));
}

SymbolicNfa prune(const SymbolicNfa& a, const CnfGrammar& g, std::span<const TokenId> sigma,
                  PruneStats* stats) {
  PruneStats st;
  const auto n = static_cast<std::uint32_t>(sigma.size());
  std::uint32_t d = 0;
  for (const auto& c : a.coords())
    if (c) d = std::max(d, c->j);
  if (d == 0 || cyk_accepts(g, sigma)) {
    if (stats) *stats = st;
    return a;
  }

  auto empty = [&](const SymbolicNfa& t) {
    ++st.queries;
    return !decide_early(g, t);
  };
  auto clamp_sub = [](std::int64_t v) { return static_cast<std::uint32_t>(std::max<std::int64_t>(0, v)); };

  std::vector<StateId> doomed;
  // Zero-edit states, from the end of σ backwards. q(0, 0) is initial.
  for (std::uint32_t k = n; k >= 1; --k) {
    const auto rest = static_cast<std::int64_t>(n - k);
    const auto t = padded_prefix_nfa(sigma.first(k), clamp_sub(rest - d),
                                     static_cast<std::uint32_t>(rest + d));
    if (!empty(t)) break;
    doomed.push_back(*a.find({k, 0}));
    ++st.prefix_removed;
  }
  // Max-edit states, from the start of σ forwards.
  for (std::uint32_t i = 0; i <= n; ++i) {
    const auto t = padded_suffix_nfa(clamp_sub(static_cast<std::int64_t>(i) - d), i + d,
                                     sigma.subspan(i));
    if (!empty(t)) break;
    doomed.push_back(*a.find({i, d}));
    ++st.suffix_removed;
  }
  std::sort(doomed.begin(), doomed.end());
  doomed.erase(std::unique(doomed.begin(), doomed.end()), doomed.end());

  const SymbolicNfa kept = remove_states(a, doomed);
  std::vector<StateId> finals;
  for (auto f : kept.finals())
    if (kept.coord(f) != LevCoord{n, 0}) finals.push_back(f);
  SymbolicNfa out(kept.num_states(), kept.arcs(), kept.initial(), std::move(finals), kept.coords());
  if (stats) *stats = st;
  return trim(out);
}

}  // namespace synfix
