#pragma once

#include <span>

#include "synfix/automata.hpp"
#include "synfix/grammar.hpp"

namespace synfix {

struct PruneStats {
  std::uint32_t prefix_removed = 0;  // zero-edit states q(k, 0)
  std::uint32_t suffix_removed = 0;  // max-edit states q(i, d)
  std::uint32_t queries = 0;
};

/// Removes Levenshtein states that no grammatical word can pass through.
///
/// A word through q(k, 0) reads σ[1..k] unedited and then k' tokens with
/// |n − k − k'| ≤ d; a word through q(i, d) has spent every edit on a prefix
/// of length within d of i and then reads σ[i+1..n] unedited. Each state is
/// dropped when the matching padded template has an empty intersection with
/// the grammar. Both tests are monotone in k and i, so the search stops at
/// the first surviving state. q(n, 0) is never final since σ ∉ L(g).
///
/// `a` must come from lev_build(σ, d); a valid σ or d = 0 returns `a`.
SymbolicNfa prune(const SymbolicNfa& a, const CnfGrammar& g, std::span<const TokenId> sigma,
                  PruneStats* stats = nullptr);

/// Chain σ[1..k] followed by between lo and hi arbitrary tokens.
SymbolicNfa padded_prefix_nfa(std::span<const TokenId> prefix, std::uint32_t lo, std::uint32_t hi);
/// Between lo and hi arbitrary tokens followed by the chain `suffix`.
SymbolicNfa padded_suffix_nfa(std::uint32_t lo, std::uint32_t hi, std::span<const TokenId> suffix);

}  // namespace synfix
