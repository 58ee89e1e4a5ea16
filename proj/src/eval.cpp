#include "synfix/eval.hpp"

#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>

#include <omp.h>

namespace synfix {

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::FixNotInLanguage: return "fix-not-in-language";
    case Outcome::FixOutsideRadius: return "fix-outside-radius";
    case Outcome::RadiusExhausted: return "radius-exhausted";
    case Outcome::NotSampled: return "not-sampled";
    case Outcome::Top1: return "top-1";
    case Outcome::TopK: return "top-k";
    case Outcome::BeyondK: return "beyond-k";
  }
  return "?";
}

std::vector<RepairInstance> parse_dataset(std::string_view text, const Alphabet& alphabet) {
  std::vector<RepairInstance> out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
      throw std::invalid_argument("dataset line " + std::to_string(lineno) +
                                  ": expected two TAB-separated fields");
    RepairInstance inst{alphabet.encode(line.substr(0, tab)), alphabet.encode(line.substr(tab + 1))};
    if (inst.broken.empty() || inst.fixed.empty())
      throw std::invalid_argument("dataset line " + std::to_string(lineno) + ": empty field");
    out.push_back(std::move(inst));
  }
  return out;
}

EvalReport evaluate(const CnfGrammar& g, const std::vector<RepairInstance>& dataset,
                    const EvalOptions& opts) {
  // Extend the model once so instances share it read-only.
  NGramModel model = opts.repair.model ? *opts.repair.model : NGramModel(2);
  model.bind(g.alphabet());
  RepairConfig cfg = opts.repair;
  cfg.model = &model;
  cfg.exec = Exec::Sequential;

  EvalReport report;
  report.k = opts.k;
  report.records.resize(dataset.size());
  const auto n = static_cast<std::int64_t>(dataset.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& inst = dataset[static_cast<std::size_t>(i)];
    auto& rec = report.records[static_cast<std::size_t>(i)];
    const auto t0 = std::chrono::steady_clock::now();
    rec.length = inst.broken.size();
    rec.distance = edit_distance(inst.broken, inst.fixed);
    if (!cyk_accepts(g, inst.fixed)) {
      rec.outcome = Outcome::FixNotInLanguage;
    } else {
      try {
        const RepairReport r = repair(g, inst.broken, cfg);
        rec.radius = r.radius;
        for (const auto& rep : r.result.repairs) rec.ranked.push_back(rep.tokens);
        for (std::size_t j = 0; j < rec.ranked.size(); ++j)
          if (rec.ranked[j] == inst.fixed) {
            rec.rank = j + 1;
            break;
          }
        if (rec.rank) {
          rec.outcome = *rec.rank == 1        ? Outcome::Top1
                        : *rec.rank <= opts.k ? Outcome::TopK
                                              : Outcome::BeyondK;
        } else {
          rec.outcome = rec.distance > r.radius ? Outcome::FixOutsideRadius : Outcome::NotSampled;
        }
      } catch (const RadiusExhausted& e) {
        rec.radius = e.radius;
        rec.outcome = Outcome::RadiusExhausted;
      }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return report;
}

std::string format_report(const EvalReport& report) {
  struct Bin {
    std::size_t n = 0, top1 = 0, topk = 0, any = 0;
  };
  std::map<std::pair<int, std::string>, Bin> bins;
  auto add = [&](int order, const std::string& label, const EvalRecord& r) {
    auto& b = bins[{order, label}];
    ++b.n;
    if (r.rank) {
      ++b.any;
      if (*r.rank == 1) ++b.top1;
      if (*r.rank <= report.k) ++b.topk;
    }
  };
  for (const auto& r : report.records) {
    const std::size_t lo = r.length / 10 * 10;
    std::ostringstream len;
    len << "len[" << std::setw(3) << std::setfill('0') << lo << "," << std::setw(3) << lo + 10 << ")";
    add(0, len.str(), r);
    add(1, r.distance >= 4 ? "dist>=4" : "dist=" + std::to_string(r.distance), r);
    add(2, "all", r);
  }
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "bin\tn\tP@1\tP@" << report.k << "\tP@all\n";
  for (const auto& [key, b] : bins) {
    const double n = static_cast<double>(b.n);
    os << key.second << '\t' << b.n << '\t' << b.top1 / n << '\t' << b.topk / n << '\t'
       << b.any / n << '\n';
  }
  std::map<Outcome, std::size_t> outcomes;
  for (const auto& r : report.records) ++outcomes[r.outcome];
  for (const auto& [o, c] : outcomes) os << "outcome\t" << outcome_name(o) << '\t' << c << '\n';
  return os.str();
}

}  // namespace synfix
