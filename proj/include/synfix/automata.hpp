#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synfix/grammar.hpp"

namespace synfix {

using StateId = std::uint32_t;

/// Arc label: one token, every token but one, or any token.
struct Predicate {
  enum class Kind : std::uint8_t { Equals, NotEquals, Any };
  Kind kind = Kind::Any;
  TokenId token = 0;

  static Predicate eq(TokenId t) { return {Kind::Equals, t}; }
  static Predicate ne(TokenId t) { return {Kind::NotEquals, t}; }
  static Predicate any() { return {Kind::Any, 0}; }

  bool accepts(TokenId s) const {
    switch (kind) {
      case Kind::Equals: return s == token;
      case Kind::NotEquals: return s != token;
      case Kind::Any: return true;
    }
    return false;
  }

  friend bool operator==(const Predicate&, const Predicate&) = default;
  friend auto operator<=>(const Predicate&, const Predicate&) = default;
};

struct Arc {
  StateId src;
  Predicate pred;
  StateId dst;

  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// (i, j): tokens of the input consumed, edits spent.
struct LevCoord {
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  friend bool operator==(const LevCoord&, const LevCoord&) = default;
};

/// ε-free NFA whose arcs carry token predicates. "Ordered" means state 0 is
/// initial and every arc goes from a lower to a strictly higher state.
class SymbolicNfa {
 public:
  SymbolicNfa() = default;
  SymbolicNfa(std::size_t num_states, std::vector<Arc> arcs, StateId initial,
              std::vector<StateId> finals,
              std::vector<std::optional<LevCoord>> coords = {});

  std::size_t num_states() const { return num_states_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  StateId initial() const { return initial_; }
  const std::vector<StateId>& finals() const { return finals_; }
  bool is_final(StateId q) const { return is_final_.at(q); }
  const std::vector<std::optional<LevCoord>>& coords() const { return coords_; }
  std::optional<LevCoord> coord(StateId q) const { return coords_.at(q); }

  bool is_ordered() const;
  /// State id carrying the given coordinate, if any.
  std::optional<StateId> find(LevCoord c) const;

  /// Debug text: header lines, then `src  predicate  dst` per arc.
  std::string to_text(const Alphabet& alphabet) const;

 private:
  std::size_t num_states_ = 0;
  std::vector<Arc> arcs_;
  StateId initial_ = 0;
  std::vector<StateId> finals_;
  std::vector<bool> is_final_;
  std::vector<std::optional<LevCoord>> coords_;
};

class AutomatonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square bit matrix with rows stored as 64-bit words.
class BoolMatrix {
 public:
  BoolMatrix() = default;
  explicit BoolMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t words_per_row() const { return wpr_; }
  bool get(std::size_t r, std::size_t c) const {
    return (bits_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool v = true) {
    auto& w = bits_[r * wpr_ + (c >> 6)];
    const std::uint64_t m = std::uint64_t{1} << (c & 63);
    w = v ? (w | m) : (w & ~m);
  }
  std::span<const std::uint64_t> row(std::size_t r) const {
    return {bits_.data() + r * wpr_, wpr_};
  }
  std::span<std::uint64_t> row(std::size_t r) { return {bits_.data() + r * wpr_, wpr_}; }

  bool strictly_upper_triangular() const;
  BoolMatrix transpose() const;
  /// Boolean product over (∨, ∧).
  BoolMatrix multiply(const BoolMatrix& other) const;
  std::string to_text() const;

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t wpr_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Symbolic insertion and substitution arcs exclude the token a match would
/// read; Unrestricted ones accept any token, which makes one word reachable
/// along several alignments. Both accept the same language.
enum class LevArcs { Symbolic, Unrestricted };

/// Acyclic Levenshtein automaton accepting every string within `max_dist`
/// edits of `sigma`. States are emitted in (i + j, i) order.
SymbolicNfa lev_build(std::span<const TokenId> sigma, std::uint32_t max_dist,
                      LevArcs kind = LevArcs::Symbolic);

/// Chain accepting exactly `sigma`.
SymbolicNfa singleton_nfa(std::span<const TokenId> sigma);

/// A porous string: nullopt marks a hole.
using PorousSeq = std::vector<std::optional<TokenId>>;

/// Chain with Any arcs at holes.
SymbolicNfa template_nfa(const PorousSeq& porous);

/// Parses a porous string; `_` is a hole.
PorousSeq parse_porous(const Alphabet& alphabet, std::string_view text);

/// Renumbers states so every arc ascends. Levenshtein automata are sorted by
/// (i + j, i); others by Kahn's algorithm with smallest-index tie-break.
SymbolicNfa order_states(const SymbolicNfa& a);

/// Drops the given states and every arc touching them.
SymbolicNfa remove_states(const SymbolicNfa& a, const std::vector<StateId>& doomed);

/// Keeps only states on some initial-to-final path (initial always kept).
SymbolicNfa trim(const SymbolicNfa& a);

BoolMatrix adjacency(const SymbolicNfa& a);
/// Reflexive-transitive closure by repeated squaring.
BoolMatrix reachability(const BoolMatrix& m);
/// Pairs joined by a path of length ≥ 1.
BoolMatrix strict_reachability(const BoolMatrix& adj);

bool nfa_accepts(const SymbolicNfa& a, std::span<const TokenId> sigma);

/// Replaces symbolic arcs by one Equals arc per accepted token.
SymbolicNfa concretize(const SymbolicNfa& a, std::size_t alphabet_size);

}  // namespace synfix
