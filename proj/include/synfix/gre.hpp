#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "synfix/grammar.hpp"

namespace synfix {

using BigNat = boost::multiprecision::cpp_int;

enum class GreKind : std::uint8_t { Empty, Epsilon, Atoms, Cat, Or, And };

/// Handle to a node of a GreArena. Equal handles denote structurally equal
/// terms within the same arena.
struct Gre {
  std::uint32_t id = 0;

  friend bool operator==(const Gre&, const Gre&) = default;
  friend auto operator<=>(const Gre&, const Gre&) = default;
};

class GreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hash-consed store of star-free generalized regular expressions.
///
/// Constructors simplify only where the tree count is preserved
/// (∅ is absorbing for ·, the unit for ∨; ε is the unit for ·), so
/// tree_count(e) is invariant under construction. Derivatives, follow sets
/// and tree counts are memoized per node.
///
/// Not synchronized: one arena belongs to one thread at a time. Handles and
/// read-only queries on a finished arena may be shared.
class GreArena {
 public:
  GreArena();

  Gre empty() const { return {0}; }
  Gre epsilon() const { return {1}; }
  /// Disjunction of the given tokens; duplicates are dropped.
  Gre atoms(std::vector<TokenId> tokens);
  Gre atom(TokenId t) { return atoms({t}); }
  Gre cat(Gre x, Gre z);
  Gre alt(Gre x, Gre z);
  Gre conj(Gre x, Gre z);
  /// Balanced disjunction of all terms, in the given order.
  Gre alt_all(std::span<const Gre> terms);
  Gre word(std::span<const TokenId> tokens);

  GreKind kind(Gre e) const { return nodes_.at(e.id).kind; }
  Gre left(Gre e) const { return {nodes_.at(e.id).a}; }
  Gre right(Gre e) const { return {nodes_.at(e.id).b}; }
  std::span<const TokenId> tokens(Gre e) const;
  std::size_t size() const { return nodes_.size(); }

  bool nullable(Gre e) const { return nodes_.at(e.id).nullable; }
  bool has_conj(Gre e) const { return nodes_.at(e.id).has_and; }
  bool has_epsilon(Gre e) const { return nodes_.at(e.id).has_eps; }

  /// Brzozowski derivative by one token.
  Gre derivative(Gre e, TokenId a);
  Gre derivative(Gre e, std::span<const TokenId> prefix);

  /// Tokens that can start a word of e, ascending. Throws on ∅ and ∧.
  const std::vector<TokenId>& follow(Gre e);

  /// Number of parse trees: |S| for atom sets, product for ·, sum for ∨,
  /// with |∅| = 0 and |ε| = 1. Throws on ∧.
  const BigNat& tree_count(Gre e);

 private:
  struct Node {
    GreKind kind;
    std::uint32_t a = 0;  // left child, or atom-set index
    std::uint32_t b = 0;
    bool nullable = false;
    bool has_and = false;
    bool has_eps = false;
  };
  struct Key {
    GreKind kind;
    std::uint32_t a, b;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = (std::uint64_t{k.a} << 32) ^ k.b;
      h ^= static_cast<std::uint64_t>(k.kind) * 0x9e3779b97f4a7c15ull;
      h *= 0xff51afd7ed558ccdull;
      return static_cast<std::size_t>(h ^ (h >> 33));
    }
  };
  struct VecHash {
    std::size_t operator()(const std::vector<TokenId>& v) const {
      std::size_t h = v.size();
      for (auto t : v) h = h * 1000003u ^ t;
      return h;
    }
  };

  Gre intern(Node n);

  std::vector<Node> nodes_;
  std::unordered_map<Key, std::uint32_t, KeyHash> index_;
  std::vector<std::vector<TokenId>> atom_sets_;
  std::unordered_map<std::vector<TokenId>, std::uint32_t, VecHash> atom_index_;
  std::unordered_map<std::uint64_t, std::uint32_t> deriv_memo_;
  std::unordered_map<std::uint32_t, std::vector<TokenId>> follow_memo_;
  std::unordered_map<std::uint32_t, BigNat> count_memo_;
};

/// σ ∈ L(e) iff the derivative of e by σ is nullable.
bool matches(GreArena& arena, Gre e, std::span<const TokenId> sigma);

/// Returns an index in [0, n).
using Selector = std::function<std::size_t(std::size_t n)>;
Selector first_selector();
Selector random_selector(std::uint64_t seed);

/// Draws a witness by alternating follow-set choice and derivatives.
TokenSeq choose(GreArena& arena, Gre e, const Selector& pick);

/// Yield of the n-th parse tree (mixed-radix over tree counts).
TokenSeq enumerate_tree(GreArena& arena, Gre e, const BigNat& n);

/// Fully parenthesized text: `∅`, `ε`, `{a,b}`, `(x · z)`, `(x ∨ z)`,
/// `(x ∧ z)`. Reserved characters in token labels are backslash-escaped.
std::string to_string(const GreArena& arena, Gre e, const Alphabet& alphabet);
Gre parse_gre(GreArena& arena, const Alphabet& alphabet, std::string_view text);

/// Grammar with one nonterminal per distinct subterm. Requires an
/// (ε, ∧, ∅)-free term.
Cfg regex_to_cfg(const GreArena& arena, Gre e, const Alphabet& alphabet);

}  // namespace synfix
