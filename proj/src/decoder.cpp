#include "synfix/decoder.hpp"

#include <algorithm>
#include <set>

namespace synfix {

std::uint32_t edit_distance(std::span<const TokenId> a, std::span<const TokenId> b) {
  std::vector<std::uint32_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace {

struct Better {
  bool operator()(const Trajectory& x, const Trajectory& y) const {
    if (x.logscore != y.logscore) return x.logscore > y.logscore;
    return x.prefix < y.prefix;
  }
  bool operator()(const Repair& x, const Repair& y) const {
    if (x.logscore != y.logscore) return x.logscore > y.logscore;
    return x.tokens < y.tokens;
  }
};

}  // namespace

RepairResult reg_dcode(GreArena& arena, Gre e, const NGramModel& model,
                       std::span<const NGramModel::Id> ids, const DecodeOptions& opts,
                       std::span<const TokenId> reference) {
  if (e == arena.empty()) throw DecodeError("cannot decode the empty language");
  if (arena.has_conj(e)) throw DecodeError("cannot decode a conjunction");
  if (opts.top_k == 0) throw DecodeError("top-k must be positive");

  const std::size_t c = model.order();
  const auto start = std::chrono::steady_clock::now();
  std::vector<NGramModel::Id> ctx;
  ctx.reserve(c);
  auto context_of = [&](const TokenSeq& prefix) {
    ctx.assign(c - 1, model.bos());
    const std::size_t take = std::min(prefix.size(), c - 1);
    for (std::size_t i = prefix.size() - take; i < prefix.size(); ++i) {
      ctx.erase(ctx.begin());
      ctx.push_back(ids[prefix[i]]);
    }
  };

  RepairResult result;
  // Best top_k completions so far.
  std::set<Repair, Better> pool;
  auto complete_word = [&](TokenSeq tokens, double logscore) {
    ++result.completed;
    if (pool.size() == opts.top_k) {
      const Repair& worst = *std::prev(pool.end());
      if (!Better{}(Repair{tokens, logscore, 0}, worst)) return;
      pool.erase(std::prev(pool.end()));
    }
    pool.insert({std::move(tokens), logscore, 0});
  };
  std::set<Trajectory, Better> queue;
  bool evicted = false;

  if (arena.nullable(e)) {
    context_of({});
    complete_word({}, model.logprob(ctx, model.eos()));
  }
  queue.insert({{}, e, 0.0});

  while (!queue.empty()) {
    if (opts.budget.max_expansions && result.expansions >= opts.budget.max_expansions) break;
    if (opts.budget.wall.count() && (result.expansions & 63) == 0 &&
        std::chrono::steady_clock::now() - start >= opts.budget.wall)
      break;
    Trajectory t = std::move(queue.extract(queue.begin()).value());
    ++result.expansions;
    if (t.residual == arena.epsilon() || arena.kind(t.residual) == GreKind::Empty) continue;
    context_of(t.prefix);
    const std::vector<TokenId> follow = arena.follow(t.residual);
    for (TokenId s : follow) {
      const Gre next = arena.derivative(t.residual, s);
      if (next == arena.empty()) continue;
      Trajectory ext{t.prefix, next, t.logscore + model.logprob(ctx, ids[s])};
      ext.prefix.push_back(s);
      if (arena.nullable(next)) {
        context_of(ext.prefix);
        complete_word(ext.prefix, ext.logscore + model.logprob(ctx, model.eos()));
        context_of(t.prefix);
      }
      if (next == arena.epsilon() || arena.follow(next).empty()) continue;
      queue.insert(std::move(ext));
      if (queue.size() > opts.queue_cap) {
        queue.erase(std::prev(queue.end()));
        evicted = true;
      }
    }
  }

  result.exhausted = queue.empty() && !evicted;
  result.repairs.assign(pool.begin(), pool.end());
  for (auto& r : result.repairs) r.distance = edit_distance(reference, r.tokens);
  return result;
}

std::vector<TokenSeq> enumerate_all(GreArena& arena, Gre e, std::uint64_t limit) {
  const BigNat& n = arena.tree_count(e);
  if (n > limit) throw DecodeError("enumerate_all: tree count exceeds the limit");
  std::set<TokenSeq> words;
  const auto count = static_cast<std::uint64_t>(n);
  for (std::uint64_t i = 0; i < count; ++i) words.insert(enumerate_tree(arena, e, BigNat(i)));
  return {words.begin(), words.end()};
}

}  // namespace synfix
