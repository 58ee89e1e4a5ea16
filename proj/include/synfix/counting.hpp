#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "synfix/automata.hpp"
#include "synfix/grammar.hpp"
#include "synfix/gre.hpp"

namespace synfix {

class CountingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Partial deterministic automaton. Transitions of each state are sorted by
/// token.
struct Dfa {
  std::size_t num_states = 0;
  std::vector<std::vector<std::pair<TokenId, StateId>>> delta;
  StateId initial = 0;
  std::vector<bool> finals;

  std::optional<StateId> step(StateId q, TokenId t) const;
  bool accepts(std::span<const TokenId> sigma) const;
  std::size_t num_transitions() const;
  SymbolicNfa to_nfa() const;
};

/// Thompson-style construction without ε-arcs. Each shared subterm is
/// unfolded, so the state count follows the tree size; construction throws
/// CountingError above `max_states`.
///
/// With merge_or, every ∨ node gets one fresh initial and one fresh final
/// state. Without it the finals of both branches are kept.
SymbolicNfa gre_to_nfa(GreArena& arena, Gre e, bool merge_or, std::size_t max_states = 1u << 22);

/// Subset construction over concretized arcs.
Dfa determinize(const SymbolicNfa& a, std::size_t alphabet_size);
/// Mirror-language automaton with a fresh initial state, reordered.
SymbolicNfa reverse(const SymbolicNfa& a);
/// Brzozowski: determinize ∘ reverse ∘ determinize ∘ reverse.
Dfa minimize(const SymbolicNfa& a, std::size_t alphabet_size);

/// A[q, q'] = number of tokens taking q to q'.
struct CountMatrix {
  std::size_t n = 0;
  std::vector<BigNat> a;

  const BigNat& at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};
CountMatrix count_matrix(const Dfa& d);

/// Σ over finals and i < |Q| of Aⁱ[q_α, q_ω], by iterating the row vector
/// of the initial state. Throws CountingError on a cycle.
BigNat count_words(const Dfa& d);

/// Number of accepting paths, counting each accepted token of an arc
/// separately. For an NFA this bounds the word count from above.
BigNat count_paths(const SymbolicNfa& a, std::size_t alphabet_size);

/// Exact number of words in L(g) within distance d of σ.
BigNat volume(const CnfGrammar& g, std::span<const TokenId> sigma, std::uint32_t d);

}  // namespace synfix
