#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace synfix {

using TokenId = std::uint32_t;
using NonterminalId = std::uint32_t;
using TokenSeq = std::vector<TokenId>;

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interned token spellings. Ids are dense in [0, size()).
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(const std::vector<std::string>& labels);

  TokenId intern(std::string_view label);
  std::size_t size() const { return labels_.size(); }
  bool contains(std::string_view label) const;
  /// Throws GrammarError for labels outside the alphabet.
  TokenId id(std::string_view label) const;
  const std::string& label(TokenId t) const { return labels_.at(t); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Splits on whitespace and maps every token through id().
  TokenSeq encode(std::string_view text) const;
  std::string decode(std::span<const TokenId> tokens) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, TokenId> index_;
};

struct Symbol {
  bool terminal = false;
  std::uint32_t index = 0;

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

struct Production {
  NonterminalId lhs = 0;
  std::vector<Symbol> rhs;

  friend bool operator==(const Production&, const Production&) = default;
};

/// A context-free grammar over an interned alphabet. ε-free.
struct Cfg {
  Alphabet terminals;
  std::vector<std::string> nonterminals;
  std::vector<Production> productions;
  NonterminalId start = 0;

  NonterminalId nonterminal(std::string_view name) const;
  /// Throws GrammarError if an invariant is violated.
  void validate() const;
  std::string to_string() const;
};

/// `LHS -> a b | c` lines; `#` comments; first LHS is the start symbol.
Cfg parse_grammar(std::string_view text);

struct BinaryRule {
  NonterminalId lhs;
  NonterminalId left;
  NonterminalId right;

  friend bool operator==(const BinaryRule&, const BinaryRule&) = default;
  friend auto operator<=>(const BinaryRule&, const BinaryRule&) = default;
};

struct UnitRule {
  NonterminalId lhs;
  TokenId token;

  friend bool operator==(const UnitRule&, const UnitRule&) = default;
  friend auto operator<=>(const UnitRule&, const UnitRule&) = default;
};

/// Grammar in Chomsky normal form with the lookup tables the chart
/// algorithms need. Immutable once built.
class CnfGrammar {
 public:
  CnfGrammar(Alphabet terminals, std::vector<std::string> nonterminals,
             std::vector<BinaryRule> binary, std::vector<UnitRule> unit,
             NonterminalId start);

  const Alphabet& alphabet() const { return terminals_; }
  std::size_t num_nonterminals() const { return names_.size(); }
  std::size_t num_terminals() const { return terminals_.size(); }
  const std::string& name(NonterminalId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  NonterminalId start() const { return start_; }

  const std::vector<BinaryRule>& binary_rules() const { return binary_; }
  const std::vector<UnitRule>& unit_rules() const { return unit_; }

  /// w with (w -> left right).
  const std::vector<NonterminalId>& parents(NonterminalId left,
                                            NonterminalId right) const;
  /// w with (w -> t).
  const std::vector<NonterminalId>& producers(TokenId t) const {
    return producers_.at(t);
  }
  /// t with (w -> t), ascending.
  const std::vector<TokenId>& yields(NonterminalId w) const {
    return yields_.at(w);
  }
  /// (right, lhs) pairs for every rule lhs -> left right.
  const std::vector<std::pair<NonterminalId, NonterminalId>>& by_left(
      NonterminalId left) const {
    return by_left_.at(left);
  }
  /// (left, right) pairs for every rule lhs -> left right.
  const std::vector<std::pair<NonterminalId, NonterminalId>>& by_lhs(
      NonterminalId lhs) const {
    return by_lhs_.at(lhs);
  }
  bool has_unit(NonterminalId w, TokenId t) const;

  std::string to_string() const;

 private:
  Alphabet terminals_;
  std::vector<std::string> names_;
  std::vector<BinaryRule> binary_;
  std::vector<UnitRule> unit_;
  NonterminalId start_;

  std::vector<std::vector<NonterminalId>> parents_;  // left * V + right
  std::vector<std::vector<NonterminalId>> producers_;
  std::vector<std::vector<TokenId>> yields_;
  std::vector<std::vector<std::pair<NonterminalId, NonterminalId>>> by_left_;
  std::vector<std::vector<std::pair<NonterminalId, NonterminalId>>> by_lhs_;
};

/// Language-preserving conversion. Throws GrammarError when the grammar
/// generates no string.
CnfGrammar to_cnf(const Cfg& g);

/// Membership by filling the chart superdiagonal by superdiagonal.
bool cyk_accepts(const CnfGrammar& g, std::span<const TokenId> sigma);

}  // namespace synfix
