#include "synfix/pipeline.hpp"

#include <cmath>

#include "synfix/prune.hpp"

namespace synfix {

namespace {

bool model_covers(const NGramModel& m, const Alphabet& alphabet) {
  for (const auto& l : alphabet.labels())
    if (!m.contains(l)) return false;
  return true;
}

}  // namespace

RepairReport repair(const CnfGrammar& g, std::span<const TokenId> sigma, const RepairConfig& cfg) {
  if (sigma.empty()) throw GrammarError("cannot repair an empty token sequence");

  // Decoding needs every grammar token in the model vocabulary.
  std::optional<NGramModel> local;
  const NGramModel* model = cfg.model;
  if (!model || !model_covers(*model, g.alphabet())) {
    local = model ? *model : NGramModel(2);
    local->bind(g.alphabet());
    model = &*local;
  }
  std::vector<NGramModel::Id> ids;
  for (const auto& l : g.alphabet().labels()) ids.push_back(model->id(l));

  RepairReport report;
  if (cyk_accepts(g, sigma)) {
    report.input_valid = true;
    report.result.exhausted = true;
    report.result.completed = 1;
    std::vector<NGramModel::Id> mapped;
    for (auto t : sigma) mapped.push_back(ids[t]);
    report.result.repairs.push_back({TokenSeq(sigma.begin(), sigma.end()), model->score(mapped), 0});
    return report;
  }

  if (cfg.radius) {
    report.radius = *cfg.radius;
  } else {
    auto d = led(g, sigma, cfg.max_radius);
    if (!d) throw RadiusExhausted("no repair within the largest radius tried", cfg.max_radius);
    report.radius = *d + cfg.slack;
  }

  SymbolicNfa a = lev_build(sigma, report.radius);
  if (cfg.prune) a = prune(a, g, sigma);
  report.states = a.num_states();
  const ParseChart chart = cfl_fixpt(g, a, cfg.exec, &report.fixpoint);
  if (!nonempty(chart, a, g))
    throw RadiusExhausted("no repair within radius " + std::to_string(report.radius),
                          report.radius);

  GreArena arena;
  const Gre e = reg_build(arena, chart, g, a);
  report.result = reg_dcode(arena, e, *model, ids, cfg.decode, sigma);
  return report;
}

std::set<TokenSeq> brute_force_repairs(const CnfGrammar& g, std::span<const TokenId> sigma,
                                       std::uint32_t d, double guard) {
  const auto sigma_size = static_cast<double>(g.num_terminals());
  const double bound =
      std::pow((2 * sigma_size + 1) * static_cast<double>(sigma.size() + d + 1), d);
  if (bound > guard) throw GuardExceeded("brute-force repair space exceeds the guard");

  const auto nt = static_cast<TokenId>(g.num_terminals());
  std::set<TokenSeq> ball{TokenSeq(sigma.begin(), sigma.end())};
  std::vector<TokenSeq> frontier{TokenSeq(sigma.begin(), sigma.end())};
  for (std::uint32_t step = 0; step < d; ++step) {
    std::vector<TokenSeq> next;
    auto offer = [&](TokenSeq w) {
      if (ball.insert(w).second) next.push_back(std::move(w));
    };
    for (const auto& w : frontier) {
      for (std::size_t i = 0; i <= w.size(); ++i) {
        for (TokenId t = 0; t < nt; ++t) {
          TokenSeq ins = w;
          ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(i), t);
          offer(std::move(ins));
        }
        if (i == w.size()) break;
        TokenSeq del = w;
        del.erase(del.begin() + static_cast<std::ptrdiff_t>(i));
        offer(std::move(del));
        for (TokenId t = 0; t < nt; ++t) {
          if (t == w[i]) continue;
          TokenSeq sub = w;
          sub[i] = t;
          offer(std::move(sub));
        }
      }
    }
    frontier = std::move(next);
  }

  std::set<TokenSeq> out;
  for (const auto& w : ball)
    if (!w.empty() && edit_distance(sigma, w) <= d && cyk_accepts(g, w)) out.insert(w);
  return out;
}

double precision_at_k(const std::vector<std::vector<TokenSeq>>& ranked,
                      const std::vector<RepairInstance>& dataset, std::size_t k) {
  if (dataset.empty()) throw std::invalid_argument("precision_at_k: empty dataset");
  if (ranked.size() != dataset.size())
    throw std::invalid_argument("precision_at_k: one ranked list per instance is required");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& list = ranked[i];
    const std::size_t n = std::min(k, list.size());
    for (std::size_t j = 0; j < n; ++j) {
      if (list[j] == dataset[i].fixed) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

}  // namespace synfix
