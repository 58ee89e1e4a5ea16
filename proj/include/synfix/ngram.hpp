#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synfix/grammar.hpp"

namespace synfix {

class NGramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Order-c Markov model with Laplace smoothing over its whole vocabulary.
/// Sequences are padded with c−1 begin sentinels and one end sentinel.
class NGramModel {
 public:
  using Id = std::uint32_t;
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";

  /// A model with no counts: every continuation has probability 1/|vocab|.
  explicit NGramModel(std::size_t order = 4);

  static NGramModel train(const std::vector<std::vector<std::string>>& corpus, std::size_t order);

  std::size_t order() const { return order_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  Id bos() const { return 0; }
  Id eos() const { return 1; }
  /// Throws NGramError for unknown labels.
  Id id(std::string_view label) const;
  bool contains(std::string_view label) const { return index_.count(std::string(label)) > 0; }

  /// Adds unseen labels with zero counts.
  void extend_vocabulary(std::span<const std::string> labels);
  /// Model id of every token of `alphabet`; extends the vocabulary first.
  std::vector<Id> bind(const Alphabet& alphabet);

  std::uint64_t count(std::span<const Id> window) const;
  std::uint64_t total(std::span<const Id> context) const;

  /// ln((C[ctx·s] + 1) / (C[ctx] + |vocab|)); `ctx` has length c−1.
  double logprob(std::span<const Id> ctx, Id s) const;
  /// Sum of logprobs over the padded sequence, end sentinel included.
  double score(std::span<const Id> sigma) const;
  double score(const std::vector<std::string>& sigma) const;

  /// Text form: `ngram <c> <vocab-size>`, the vocabulary on one line, then
  /// `tok … tok<TAB>count` per window in sorted order.
  std::string serialize() const;
  static NGramModel deserialize(std::string_view text);

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<Id>& k) const {
      std::size_t h = 0xcbf29ce484222325ull;
      for (auto x : k) h = (h ^ x) * 0x100000001b3ull;
      return h;
    }
  };

  Id intern(std::string_view label);
  void add_window(std::vector<Id> window, std::uint64_t n);

  std::size_t order_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, Id> index_;
  std::unordered_map<std::vector<Id>, std::uint64_t, KeyHash> counts_;
  std::unordered_map<std::vector<Id>, std::uint64_t, KeyHash> totals_;
};

}  // namespace synfix
