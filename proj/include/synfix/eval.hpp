#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synfix/pipeline.hpp"

namespace synfix {

/// Where an instance ends up in the repair pipeline.
enum class Outcome {
  FixNotInLanguage,  // the reference fix does not parse
  FixOutsideRadius,  // the fix is farther than the radius searched
  RadiusExhausted,   // no repair at any radius tried
  NotSampled,        // reachable, but decoding did not return it
  Top1,
  TopK,
  BeyondK,
};

std::string_view outcome_name(Outcome o);

struct EvalRecord {
  std::size_t length = 0;        // |broken|
  std::uint32_t distance = 0;    // Δ(broken, fixed)
  std::uint32_t radius = 0;
  Outcome outcome = Outcome::NotSampled;
  std::optional<std::size_t> rank;  // 1-based
  std::vector<TokenSeq> ranked;
  double seconds = 0;
};

struct EvalOptions {
  RepairConfig repair;  // repair.decode.top_k bounds the ranked lists
  std::size_t k = 10;
};

struct EvalReport {
  std::vector<EvalRecord> records;
  std::size_t k = 10;
};

/// One instance per line: broken and fixed token sequences separated by a
/// TAB. Blank lines and `#` comments are skipped.
std::vector<RepairInstance> parse_dataset(std::string_view text, const Alphabet& alphabet);

/// Repairs every instance, in parallel across instances.
EvalReport evaluate(const CnfGrammar& g, const std::vector<RepairInstance>& dataset,
                    const EvalOptions& opts);

/// Tab-separated Precision@1, @k and @all per length bin (10 tokens wide)
/// and per edit-distance bin, then the outcome counts.
std::string format_report(const EvalReport& report);

}  // namespace synfix
