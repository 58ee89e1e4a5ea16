// Command-line front end: check, repair, complete, count, enumerate, led,
// train-ngram, eval.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "synfix/builtin.hpp"
#include "synfix/counting.hpp"
#include "synfix/eval.hpp"
#include "synfix/pipeline.hpp"

namespace {

using namespace synfix;

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kRadius = 3, kPartial = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CnfGrammar load_grammar(const std::string& source) {
  constexpr std::string_view kPrefix = "builtin:";
  if (source.rfind(kPrefix, 0) == 0) {
    const auto name = source.substr(kPrefix.size());
    auto body = builtin_grammar(name);
    if (!body) {
      std::string known;
      for (const auto& n : builtin_grammar_names()) known += " " + n;
      throw std::invalid_argument("unknown builtin grammar '" + name + "'; known:" + known);
    }
    return to_cnf(parse_grammar(*body));
  }
  return to_cnf(parse_grammar(read_file(source)));
}

struct Common {
  std::string grammar;
  std::vector<std::string> tokens;
  std::string input_file;
  bool tsv = false;

  std::string text() const {
    if (!input_file.empty()) return read_file(input_file);
    std::string s;
    for (const auto& t : tokens) s += t + " ";
    return s;
  }
};

void add_common(CLI::App* cmd, Common& c, bool needs_input = true) {
  cmd->add_option("-g,--grammar", c.grammar, "Grammar file, or builtin:NAME")->required();
  if (needs_input) {
    auto* toks = cmd->add_option("tokens", c.tokens, "Input tokens");
    auto* file = cmd->add_option("-i,--input", c.input_file, "Read the tokens from a file");
    toks->excludes(file);
  }
  cmd->add_flag("--tsv", c.tsv, "Machine-readable tab-separated output");
}

struct RadiusFlags {
  std::optional<std::uint32_t> max_dist;
  bool auto_mode = false;
  std::uint32_t slack = 0;
  std::uint32_t max_radius = 6;
};

void add_radius(CLI::App* cmd, RadiusFlags& r) {
  auto* md = cmd->add_option("-d,--max-dist", r.max_dist, "Edit radius");
  auto* au = cmd->add_flag("--auto", r.auto_mode, "Radius = language edit distance + slack");
  auto* sl = cmd->add_option("--slack", r.slack, "Extra radius in --auto mode");
  cmd->add_option("--max-radius", r.max_radius, "Largest distance searched in --auto mode");
  md->excludes(au);
  sl->needs(au);
}

std::uint32_t resolve_radius(const RadiusFlags& r, const CnfGrammar& g, const TokenSeq& sigma) {
  if (r.max_dist) return *r.max_dist;
  if (!r.auto_mode) throw CLI::ValidationError("one of --max-dist or --auto is required");
  auto d = led(g, sigma, r.max_radius);
  if (!d) throw RadiusExhausted("no repair within radius " + std::to_string(r.max_radius), r.max_radius);
  return *d + r.slack;
}

std::string join(const Alphabet& a, const TokenSeq& w) { return a.decode(w); }

// Prints up to `limit` distinct words of e; false when some were left out.
bool print_words(GreArena& arena, Gre e, const Alphabet& alphabet, std::uint64_t limit) {
  if (e == arena.empty()) return true;
  if (arena.tree_count(e) <= limit) {
    for (const auto& w : enumerate_all(arena, e, limit)) std::cout << join(alphabet, w) << '\n';
    return true;
  }
  std::set<TokenSeq> words;
  for (std::uint64_t i = 0; words.size() < limit; ++i) words.insert(enumerate_tree(arena, e, i));
  for (const auto& w : words) std::cout << join(alphabet, w) << '\n';
  return false;
}

Gre ball_gre(GreArena& arena, const CnfGrammar& g, const TokenSeq& sigma, std::uint32_t d) {
  const SymbolicNfa a = lev_build(sigma, d);
  const ParseChart chart = cfl_fixpt(g, a);
  if (!nonempty(chart, a, g)) return arena.empty();
  return reg_build(arena, chart, g, a);
}

std::uint64_t default_budget_ms() {
  if (const char* env = std::getenv("SYNFIX_BUDGET_MS")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("SYNFIX_BUDGET_MS is not a number");
    }
  }
  return 10000;
}

int run(int argc, char** argv) {
  CLI::App app{"Syntax repair by grammar/automaton intersection"};
  app.require_subcommand(1);

  Common common;
  RadiusFlags radius;
  std::size_t top_k = 10;
  std::uint64_t budget_ms = 0;
  bool wall_clock = false;
  std::string ngram_path;
  bool no_prune = false;
  std::size_t queue_cap = 1'000'000;
  std::uint64_t limit = 1000;

  auto* check = app.add_subcommand("check", "Membership test");
  add_common(check, common);

  auto* rep = app.add_subcommand("repair", "Ranked repairs of a broken token stream");
  add_common(rep, common);
  add_radius(rep, radius);
  rep->add_option("-k,--top-k", top_k, "Repairs to print")->check(CLI::PositiveNumber);
  rep->add_option("--budget-ms", budget_ms, "Decoding budget (env SYNFIX_BUDGET_MS)");
  rep->add_flag("--wall-clock", wall_clock, "Enforce the budget by wall clock");
  rep->add_option("--ngram", ngram_path, "n-gram model file");
  rep->add_flag("--no-prune", no_prune, "Skip automaton pruning");
  rep->add_option("--queue-cap", queue_cap, "Largest partial-trajectory queue");

  auto* comp = app.add_subcommand("complete", "Fill `_` holes");
  add_common(comp, common);
  comp->add_option("--limit", limit, "Most completions to print");

  auto* count = app.add_subcommand("count", "Exact number of repairs within the radius");
  add_common(count, common);
  add_radius(count, radius);

  auto* enumerate = app.add_subcommand("enumerate", "All distinct repairs within the radius");
  add_common(enumerate, common);
  add_radius(enumerate, radius);
  enumerate->add_option("--limit", limit, "Most words to print");

  std::uint32_t led_limit = 6;
  auto* ledc = app.add_subcommand("led", "Language edit distance");
  add_common(ledc, common);
  ledc->add_option("--limit", led_limit, "Largest distance searched");

  std::string corpus, out_path;
  std::size_t order = 4;
  auto* train = app.add_subcommand("train-ngram", "Train an n-gram model");
  train->add_option("--corpus", corpus, "One token sequence per line")->required();
  train->add_option("--order", order, "Model order")->check(CLI::Range(2, 16));
  train->add_option("--out", out_path, "Model file to write")->required();

  std::string dataset_path;
  auto* ev = app.add_subcommand("eval", "Binned Precision@k over a dataset");
  add_common(ev, common, false);
  add_radius(ev, radius);
  ev->add_option("--dataset", dataset_path, "broken<TAB>fixed per line")->required();
  ev->add_option("-k,--top-k", top_k, "k of Precision@k")->check(CLI::PositiveNumber);
  ev->add_option("--budget-ms", budget_ms, "Decoding budget per instance");
  ev->add_option("--ngram", ngram_path, "n-gram model file");
  ev->add_flag("--no-prune", no_prune, "Skip automaton pruning");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (train->parsed()) {
    std::vector<std::vector<std::string>> seqs;
    std::istringstream in(read_file(corpus));
    for (std::string line; std::getline(in, line);) {
      std::istringstream ls(line);
      std::vector<std::string> toks;
      for (std::string t; ls >> t;) toks.push_back(t);
      if (!toks.empty()) seqs.push_back(std::move(toks));
    }
    const NGramModel m = NGramModel::train(seqs, order);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    out << m.serialize();
    std::cout << "trained order-" << order << " model on " << seqs.size() << " sequences, vocabulary "
              << m.vocab_size() << '\n';
    return kOk;
  }

  const CnfGrammar g = load_grammar(common.grammar);
  const Alphabet& alphabet = g.alphabet();

  std::optional<NGramModel> model;
  if (!ngram_path.empty()) model = NGramModel::deserialize(read_file(ngram_path));
  RepairConfig cfg;
  if (radius.max_dist) cfg.radius = radius.max_dist;
  cfg.slack = radius.slack;
  cfg.max_radius = radius.max_radius;
  cfg.prune = !no_prune;
  cfg.model = model ? &*model : nullptr;
  cfg.decode.top_k = top_k;
  cfg.decode.queue_cap = queue_cap;
  if (budget_ms == 0) budget_ms = default_budget_ms();
  cfg.decode.budget = budget_for(std::chrono::milliseconds(budget_ms), wall_clock);

  if (ev->parsed()) {
    if (!radius.max_dist && !radius.auto_mode)
      throw CLI::ValidationError("one of --max-dist or --auto is required");
    const auto dataset = parse_dataset(read_file(dataset_path), alphabet);
    EvalOptions opts;
    opts.repair = cfg;
    opts.k = top_k;
    opts.repair.decode.top_k = std::max<std::size_t>(top_k, 1000);
    std::cout << format_report(evaluate(g, dataset, opts));
    return kOk;
  }

  if (comp->parsed()) {
    const PorousSeq porous = parse_porous(alphabet, common.text());
    GreArena arena;
    const Gre e = complete(arena, g, porous);
    return print_words(arena, e, alphabet, limit) ? kOk : kPartial;
  }

  const TokenSeq sigma = alphabet.encode(common.text());
  if (sigma.empty()) throw std::invalid_argument("no input tokens");

  if (check->parsed()) {
    const bool ok = cyk_accepts(g, sigma);
    std::cout << (ok ? "valid" : "invalid") << '\n';
    return ok ? kOk : kInvalid;
  }

  if (ledc->parsed()) {
    auto d = led(g, sigma, led_limit);
    std::cout << (d ? std::to_string(*d) : "none") << '\n';
    return d ? kOk : kRadius;
  }

  if (count->parsed()) {
    std::cout << volume(g, sigma, resolve_radius(radius, g, sigma)) << '\n';
    return kOk;
  }

  if (enumerate->parsed()) {
    GreArena arena;
    const Gre e = ball_gre(arena, g, sigma, resolve_radius(radius, g, sigma));
    return print_words(arena, e, alphabet, limit) ? kOk : kPartial;
  }

  // repair
  if (!radius.max_dist && !radius.auto_mode)
    throw CLI::ValidationError("one of --max-dist or --auto is required");
  const RepairReport report = repair(g, sigma, cfg);
  const auto& res = report.result;
  std::cout << std::fixed << std::setprecision(6);
  if (common.tsv) {
    for (std::size_t i = 0; i < res.repairs.size(); ++i) {
      const auto& r = res.repairs[i];
      std::cout << i + 1 << '\t' << r.logscore << '\t' << r.distance << '\t'
                << join(alphabet, r.tokens) << '\n';
    }
    std::cout << "exhausted\t" << (res.exhausted ? "true" : "false") << '\n';
  } else {
    std::cout << "radius " << report.radius << ", " << res.completed << " repairs found"
              << (res.exhausted ? " (complete)" : " (budget reached)") << '\n';
    for (std::size_t i = 0; i < res.repairs.size(); ++i) {
      const auto& r = res.repairs[i];
      std::cout << std::setw(3) << i + 1 << "  " << std::setw(11) << r.logscore << "  d=" << r.distance
                << "  " << join(alphabet, r.tokens) << '\n';
    }
  }
  return res.exhausted ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const RadiusExhausted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRadius;
  } catch (const GuardExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPartial;
  } catch (const CountingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPartial;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
