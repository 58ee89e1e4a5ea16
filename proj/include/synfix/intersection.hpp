#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synfix/automata.hpp"
#include "synfix/grammar.hpp"
#include "synfix/gre.hpp"

namespace synfix {

enum class Exec { Parallel, Sequential };

/// Dense |Q|×|Q|×|V| bit tensor. Cell (p, r) is a bitset over nonterminals;
/// only p < r is ever populated for ordered automata.
class ParseChart {
 public:
  static constexpr std::uint8_t kUnset = 0xff;

  ParseChart() = default;
  ParseChart(std::size_t num_states, std::size_t num_nonterminals);

  std::size_t num_states() const { return q_; }
  std::size_t num_nonterminals() const { return v_; }
  std::size_t words_per_cell() const { return wv_; }

  bool get(StateId p, StateId r, NonterminalId v) const {
    return (bits_[cell_index(p, r) + (v >> 6)] >> (v & 63)) & 1u;
  }
  /// Sets the bit and records the round it first appeared in.
  void set(StateId p, StateId r, NonterminalId v, std::uint8_t round);
  std::span<const std::uint64_t> cell(StateId p, StateId r) const {
    return {bits_.data() + cell_index(p, r), wv_};
  }
  bool any(StateId p, StateId r) const;
  /// Round in which the bit was first set: 0 for arcs, 1+ for fixpoint rounds.
  std::optional<std::uint8_t> first_round(StateId p, StateId r, NonterminalId v) const;
  std::size_t popcount() const;

  /// ■/□ grid for one nonterminal, or for the union over all of them.
  std::string to_text(std::optional<NonterminalId> v = std::nullopt) const;

  /// Compares bits only.
  friend bool operator==(const ParseChart& a, const ParseChart& b) {
    return a.q_ == b.q_ && a.v_ == b.v_ && a.bits_ == b.bits_;
  }

 private:
  friend struct ChartKernel;
  std::size_t cell_index(StateId p, StateId r) const { return (p * q_ + r) * wv_; }

  std::size_t q_ = 0;
  std::size_t v_ = 0;
  std::size_t wv_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint8_t> round_;
};

struct FixpointStats {
  std::uint32_t rounds = 0;  // passes that added at least one bit
  std::uint32_t passes = 0;  // including the final confirming pass
  std::uint32_t levels = 0;  // anti-diagonals visited
};

/// ⌈log₂(|Q||V|)⌉, at least 1.
std::uint32_t round_bound(std::size_t num_states, std::size_t num_nonterminals);

/// Arc initialization: M[p, r, w] iff some arc p→r accepts a token t with w → t.
ParseChart init_chart(const CnfGrammar& g, const SymbolicNfa& a);

/// Chart fixpoint, swept in anti-diagonal order so each pass reads only
/// completed shorter spans. States within one anti-diagonal are independent
/// and split across OpenMP threads under Exec::Parallel; the result is
/// bit-identical under either policy.
ParseChart cfl_fixpt(const CnfGrammar& g, const SymbolicNfa& a, Exec exec = Exec::Parallel,
                     FixpointStats* stats = nullptr);

/// Plain in-place loop over (p, r, q) in index order, repeated until a full
/// pass adds nothing. Serial reference for the kernel above.
ParseChart cfl_fixpt_reference(const CnfGrammar& g, const SymbolicNfa& a,
                               FixpointStats* stats = nullptr);

/// True iff the start symbol spans the initial state and some final state.
bool nonempty(const ParseChart& chart, const SymbolicNfa& a, const CnfGrammar& g);

/// Same verdict as nonempty(cfl_fixpt(g, a)); stops at the first
/// anti-diagonal that completes a start-to-final parse.
bool decide_early(const CnfGrammar& g, const SymbolicNfa& a, FixpointStats* stats = nullptr);

/// GRE per chart entry; ∅ wherever the boolean chart is 0.
class GreChart {
 public:
  GreChart() = default;
  GreChart(std::size_t num_states, std::size_t num_nonterminals)
      : q_(num_states), v_(num_nonterminals), cells_(q_ * q_ * v_) {}

  Gre at(StateId p, StateId r, NonterminalId v) const { return cells_[(p * q_ + r) * v_ + v]; }
  void put(StateId p, StateId r, NonterminalId v, Gre e) { cells_[(p * q_ + r) * v_ + v] = e; }
  std::size_t num_states() const { return q_; }
  std::size_t num_nonterminals() const { return v_; }

 private:
  std::size_t q_ = 0;
  std::size_t v_ = 0;
  std::vector<Gre> cells_;
};

class IntersectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Intersection language as a GRE, built over the completed chart. Leaves
/// are the token sets an arc and a unit rule agree on; inner entries join
/// every midpoint whose two halves both parse. Throws when the
/// intersection is empty.
Gre reg_build(GreArena& arena, const ParseChart& chart, const CnfGrammar& g,
              const SymbolicNfa& a, GreChart* out = nullptr);

/// Triple-nonterminal construction of L(g) ∩ L(a) over the concretized
/// automaton, keeping only generating and reachable triples. nullopt when
/// the intersection is empty.
std::optional<Cfg> salomaa_intersect(const CnfGrammar& g, const SymbolicNfa& a);

/// Least d ≤ limit with a nonempty distance-d intersection.
std::optional<std::uint32_t> led(const CnfGrammar& g, std::span<const TokenId> sigma,
                                 std::uint32_t limit);

/// Completions of a porous string; ∅ when there are none.
Gre complete(GreArena& arena, const CnfGrammar& g, const PorousSeq& porous);

}  // namespace synfix
