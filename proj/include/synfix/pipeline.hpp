#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "synfix/decoder.hpp"
#include "synfix/grammar.hpp"
#include "synfix/intersection.hpp"
#include "synfix/ngram.hpp"

namespace synfix {

struct RepairInstance {
  TokenSeq broken;
  TokenSeq fixed;
};

struct RepairConfig {
  /// Explicit radius; nullopt selects LED(σ) + slack.
  std::optional<std::uint32_t> radius;
  std::uint32_t slack = 0;
  /// Largest LED searched in auto mode.
  std::uint32_t max_radius = 6;
  DecodeOptions decode;
  /// nullptr selects the uniform model.
  const NGramModel* model = nullptr;
  bool prune = true;
  Exec exec = Exec::Parallel;
};

struct RepairReport {
  RepairResult result;
  std::uint32_t radius = 0;
  bool input_valid = false;
  std::size_t states = 0;  // automaton states after pruning
  FixpointStats fixpoint;
};

class RadiusExhausted : public std::runtime_error {
 public:
  RadiusExhausted(const std::string& what, std::uint32_t radius)
      : std::runtime_error(what), radius(radius) {}
  std::uint32_t radius;
};

class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Levenshtein ball → optional pruning → chart fixpoint → GRE → decoding.
/// A valid σ returns itself at distance 0.
RepairReport repair(const CnfGrammar& g, std::span<const TokenId> sigma, const RepairConfig& cfg);

/// Every grammatical word within distance d, by applying up to d edits to σ
/// directly. Refuses when ((2|Σ|+1)(|σ|+d+1))^d exceeds `guard`.
std::set<TokenSeq> brute_force_repairs(const CnfGrammar& g, std::span<const TokenId> sigma,
                                       std::uint32_t d, double guard = 1e7);

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

/// Fraction of instances whose fix appears in the first k entries of its list.
double precision_at_k(const std::vector<std::vector<TokenSeq>>& ranked,
                      const std::vector<RepairInstance>& dataset, std::size_t k);

}  // namespace synfix
