#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "synfix/gre.hpp"
#include "synfix/ngram.hpp"

namespace synfix {

/// Levenshtein distance with unit costs.
std::uint32_t edit_distance(std::span<const TokenId> a, std::span<const TokenId> b);

/// Zero means unlimited.
struct Budget {
  std::uint64_t max_expansions = 0;
  std::chrono::milliseconds wall{0};
};

/// Decoder expansions per millisecond, measured on mid-sized Dyck balls
/// (about 120/ms at d = 4..5); early expansions of large balls cost more
/// because they build most of the derivative terms.
inline constexpr std::uint64_t kExpansionsPerMs = 100;

/// Expansion budget equivalent to `ms`, or a wall-clock one.
inline Budget budget_for(std::chrono::milliseconds ms, bool wall_clock = false) {
  Budget b;
  if (wall_clock)
    b.wall = ms;
  else
    b.max_expansions = static_cast<std::uint64_t>(ms.count()) * kExpansionsPerMs;
  return b;
}

struct DecodeOptions {
  std::size_t top_k = 10;
  Budget budget;
  std::size_t queue_cap = 1'000'000;
};

struct Trajectory {
  TokenSeq prefix;
  Gre residual;
  double logscore = 0;
};

struct Repair {
  TokenSeq tokens;
  double logscore = 0;
  std::uint32_t distance = 0;

  friend bool operator==(const Repair&, const Repair&) = default;
};

struct RepairResult {
  std::vector<Repair> repairs;  // best first
  bool exhausted = false;       // the whole language was decoded
  std::size_t completed = 0;    // words found before truncation to k
  std::uint64_t expansions = 0;
};

/// Best-first decoding of L(e) under an n-gram model.
///
/// Partial trajectories sit in one ordered set keyed by (score desc,
/// prefix asc). Popping one extends it by every token of its follow set;
/// nullable extensions are completed with the end-sentinel probability, so a
/// word's score equals model.score(word). When the set outgrows the cap the
/// worst trajectory is dropped, which forfeits exhaustion.
///
/// `ids` maps grammar tokens to model ids (see NGramModel::bind). Distances
/// are measured against `reference`.
RepairResult reg_dcode(GreArena& arena, Gre e, const NGramModel& model,
                       std::span<const NGramModel::Id> ids, const DecodeOptions& opts,
                       std::span<const TokenId> reference = {});

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distinct words of e in lexicographic order, via tree enumeration. Throws
/// DecodeError when tree_count(e) exceeds `limit`.
std::vector<TokenSeq> enumerate_all(GreArena& arena, Gre e, std::uint64_t limit);

}  // namespace synfix
