#include "synfix/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace synfix {

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Alphabet::Alphabet(const std::vector<std::string>& labels) {
  for (const auto& l : labels) intern(l);
}

TokenId Alphabet::intern(std::string_view label) {
  if (label.empty()) throw GrammarError("empty token label");
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw GrammarError("token label contains whitespace: '" + std::string(label) + "'");
    }
  }
  auto it = index_.find(std::string(label));
  if (it != index_.end()) return it->second;
  auto id = static_cast<TokenId>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), id);
  return id;
}

bool Alphabet::contains(std::string_view label) const {
  return index_.count(std::string(label)) != 0;
}

TokenId Alphabet::id(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) throw GrammarError("unknown token '" + std::string(label) + "'");
  return it->second;
}

TokenSeq Alphabet::encode(std::string_view text) const {
  TokenSeq out;
  for (const auto& w : split_ws(text)) out.push_back(id(w));
  return out;
}

std::string Alphabet::decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += label(tokens[i]);
  }
  return out;
}

NonterminalId Cfg::nonterminal(std::string_view name) const {
  auto it = std::find(nonterminals.begin(), nonterminals.end(), name);
  if (it == nonterminals.end()) throw GrammarError("unknown nonterminal '" + std::string(name) + "'");
  return static_cast<NonterminalId>(it - nonterminals.begin());
}

void Cfg::validate() const {
  if (nonterminals.empty()) throw GrammarError("grammar has no nonterminals");
  if (start >= nonterminals.size()) throw GrammarError("start symbol out of range");
  bool start_has_rule = false;
  for (const auto& p : productions) {
    if (p.lhs >= nonterminals.size()) throw GrammarError("production lhs out of range");
    if (p.rhs.empty()) throw GrammarError("empty right-hand side for " + nonterminals[p.lhs]);
    for (const auto& s : p.rhs) {
      if (s.terminal ? s.index >= terminals.size() : s.index >= nonterminals.size()) {
        throw GrammarError("undeclared symbol in production for " + nonterminals[p.lhs]);
      }
    }
    start_has_rule = start_has_rule || p.lhs == start;
  }
  if (!start_has_rule) throw GrammarError("start symbol has no productions");
}

std::string Cfg::to_string() const {
  std::ostringstream os;
  std::vector<NonterminalId> order;
  order.push_back(start);
  for (NonterminalId v = 0; v < nonterminals.size(); ++v) {
    if (v != start) order.push_back(v);
  }
  for (auto v : order) {
    std::vector<std::string> alts;
    for (const auto& p : productions) {
      if (p.lhs != v) continue;
      std::string alt;
      for (const auto& s : p.rhs) {
        if (!alt.empty()) alt += ' ';
        alt += s.terminal ? terminals.label(s.index) : nonterminals[s.index];
      }
      alts.push_back(std::move(alt));
    }
    if (alts.empty()) continue;
    os << nonterminals[v] << " ->";
    for (std::size_t i = 0; i < alts.size(); ++i) os << (i ? " | " : " ") << alts[i];
    os << '\n';
  }
  return os.str();
}

Cfg parse_grammar(std::string_view text) {
  struct RawLine {
    std::string lhs;
    std::vector<std::vector<std::string>> alts;
    int line_no;
  };
  std::vector<RawLine> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      throw GrammarError("line " + std::to_string(line_no) + ": expected '->'");
    }
    auto lhs = split_ws(line.substr(0, arrow));
    if (lhs.size() != 1) {
      throw GrammarError("line " + std::to_string(line_no) + ": left-hand side must be one symbol");
    }
    RawLine raw{lhs[0], {}, line_no};
    std::string_view rest = line.substr(arrow + 2);
    // A lone '|' token separates alternatives; '|' glued to other characters
    // stays part of a terminal.
    auto words = split_ws(rest);
    std::vector<std::string> cur;
    for (const auto& w : words) {
      if (w == "|") {
        if (cur.empty()) {
          throw GrammarError("line " + std::to_string(line_no) + ": empty alternative");
        }
        raw.alts.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(w);
      }
    }
    if (cur.empty()) throw GrammarError("line " + std::to_string(line_no) + ": empty alternative");
    raw.alts.push_back(std::move(cur));
    lines.push_back(std::move(raw));
  }
  if (lines.empty()) throw GrammarError("empty grammar");

  Cfg g;
  std::unordered_map<std::string, NonterminalId> nt;
  for (const auto& l : lines) {
    if (!nt.count(l.lhs)) {
      nt.emplace(l.lhs, static_cast<NonterminalId>(g.nonterminals.size()));
      g.nonterminals.push_back(l.lhs);
    }
  }
  g.start = 0;
  for (const auto& l : lines) {
    for (const auto& alt : l.alts) {
      Production p{nt.at(l.lhs), {}};
      for (const auto& w : alt) {
        auto it = nt.find(w);
        if (it != nt.end()) {
          p.rhs.push_back({false, it->second});
        } else {
          p.rhs.push_back({true, g.terminals.intern(w)});
        }
      }
      g.productions.push_back(std::move(p));
    }
  }
  g.validate();
  return g;
}

CnfGrammar::CnfGrammar(Alphabet terminals, std::vector<std::string> nonterminals,
                       std::vector<BinaryRule> binary, std::vector<UnitRule> unit,
                       NonterminalId start)
    : terminals_(std::move(terminals)),
      names_(std::move(nonterminals)),
      binary_(std::move(binary)),
      unit_(std::move(unit)),
      start_(start) {
  const std::size_t v = names_.size();
  if (v == 0) throw GrammarError("CNF grammar needs at least one nonterminal");
  if (start_ >= v) throw GrammarError("start symbol out of range");
  if (unit_.empty()) throw GrammarError("CNF grammar has no unit rule; its language is empty");
  std::sort(binary_.begin(), binary_.end());
  binary_.erase(std::unique(binary_.begin(), binary_.end()), binary_.end());
  std::sort(unit_.begin(), unit_.end());
  unit_.erase(std::unique(unit_.begin(), unit_.end()), unit_.end());

  parents_.assign(v * v, {});
  by_left_.assign(v, {});
  by_lhs_.assign(v, {});
  for (const auto& r : binary_) {
    if (r.lhs >= v || r.left >= v || r.right >= v) throw GrammarError("binary rule out of range");
    parents_[r.left * v + r.right].push_back(r.lhs);
    by_left_[r.left].emplace_back(r.right, r.lhs);
    by_lhs_[r.lhs].emplace_back(r.left, r.right);
  }
  producers_.assign(terminals_.size(), {});
  yields_.assign(v, {});
  for (const auto& r : unit_) {
    if (r.lhs >= v || r.token >= terminals_.size()) throw GrammarError("unit rule out of range");
    producers_[r.token].push_back(r.lhs);
    yields_[r.lhs].push_back(r.token);
  }
}

const std::vector<NonterminalId>& CnfGrammar::parents(NonterminalId left,
                                                      NonterminalId right) const {
  return parents_.at(left * names_.size() + right);
}

bool CnfGrammar::has_unit(NonterminalId w, TokenId t) const {
  const auto& ys = yields_.at(w);
  return std::binary_search(ys.begin(), ys.end(), t);
}

std::string CnfGrammar::to_string() const {
  std::ostringstream os;
  std::vector<NonterminalId> order{start_};
  for (NonterminalId w = 0; w < names_.size(); ++w) {
    if (w != start_) order.push_back(w);
  }
  for (auto w : order) {
    std::vector<std::string> alts;
    for (const auto& [l, r] : by_lhs_[w]) alts.push_back(names_[l] + " " + names_[r]);
    for (auto t : yields_[w]) alts.push_back(terminals_.label(t));
    if (alts.empty()) continue;
    os << names_[w] << " ->";
    for (std::size_t i = 0; i < alts.size(); ++i) os << (i ? " | " : " ") << alts[i];
    os << '\n';
  }
  return os.str();
}

namespace {

std::string fresh_name(const std::set<std::string>& taken, std::string base) {
  while (taken.count(base)) base += '\'';
  return base;
}

}  // namespace

CnfGrammar to_cnf(const Cfg& g) {
  g.validate();
  const std::size_t nv = g.nonterminals.size();

  // Unit-chain closure: reach[a] holds every b with a =>* b through A -> B rules.
  std::vector<std::vector<bool>> reach(nv, std::vector<bool>(nv, false));
  for (std::size_t a = 0; a < nv; ++a) reach[a][a] = true;
  for (const auto& p : g.productions) {
    if (p.rhs.size() == 1 && !p.rhs[0].terminal) reach[p.lhs][p.rhs[0].index] = true;
  }
  for (std::size_t k = 0; k < nv; ++k)
    for (std::size_t i = 0; i < nv; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < nv; ++j)
          if (reach[k][j]) reach[i][j] = true;

  // Non-unit productions, inherited along unit chains, deduplicated in
  // first-seen order so naming stays reproducible.
  std::vector<Production> prods;
  std::set<std::pair<NonterminalId, std::vector<Symbol>>> seen;
  for (NonterminalId a = 0; a < nv; ++a) {
    for (const auto& p : g.productions) {
      if (!reach[a][p.lhs]) continue;
      if (p.rhs.size() == 1 && !p.rhs[0].terminal) continue;
      if (seen.emplace(a, p.rhs).second) prods.push_back({a, p.rhs});
    }
  }

  std::vector<std::string> names = g.nonterminals;
  std::set<std::string> taken(names.begin(), names.end());
  for (const auto& l : g.terminals.labels()) taken.insert(l);

  // Reuse a nonterminal whose only production is the bare terminal; otherwise
  // introduce one named after the terminal.
  std::map<TokenId, NonterminalId> lifted;
  for (NonterminalId a = 0; a < nv; ++a) {
    std::vector<const Production*> mine;
    for (const auto& p : prods)
      if (p.lhs == a) mine.push_back(&p);
    if (mine.size() == 1 && mine[0]->rhs.size() == 1 && a != g.start) {
      lifted.emplace(mine[0]->rhs[0].index, a);
    }
  }
  std::vector<BinaryRule> binary;
  std::vector<UnitRule> unit;
  auto lift = [&](TokenId t) -> NonterminalId {
    auto it = lifted.find(t);
    if (it != lifted.end()) return it->second;
    auto id = static_cast<NonterminalId>(names.size());
    names.push_back(fresh_name(taken, "T_" + g.terminals.label(t)));
    taken.insert(names.back());
    unit.push_back({id, t});
    lifted.emplace(t, id);
    return id;
  };

  std::map<NonterminalId, int> rule_counter;
  for (const auto& p : prods) {
    const int rule_no = rule_counter[p.lhs]++;
    if (p.rhs.size() == 1) {
      unit.push_back({p.lhs, p.rhs[0].index});
      continue;
    }
    std::vector<NonterminalId> syms;
    for (const auto& s : p.rhs) syms.push_back(s.terminal ? lift(s.index) : s.index);
    // Left-factored binarization: A -> X1..Xk becomes
    // A -> A.r.(k-1) Xk, A.r.(k-1) -> A.r.(k-2) X(k-1), ..., A.r.2 -> X1 X2.
    NonterminalId acc = syms[0];
    for (std::size_t i = 1; i + 1 < syms.size(); ++i) {
      auto id = static_cast<NonterminalId>(names.size());
      names.push_back(fresh_name(taken, g.nonterminals[p.lhs] + "." + std::to_string(rule_no) +
                                            "." + std::to_string(i + 1)));
      taken.insert(names.back());
      binary.push_back({id, acc, syms[i]});
      acc = id;
    }
    binary.push_back({p.lhs, acc, syms.back()});
  }

  // Trim non-generating, then unreachable nonterminals.
  const std::size_t total = names.size();
  std::vector<bool> gen(total, false);
  for (const auto& u : unit) gen[u.lhs] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& b : binary) {
      if (!gen[b.lhs] && gen[b.left] && gen[b.right]) gen[b.lhs] = changed = true;
    }
  }
  if (!gen[g.start]) throw GrammarError("grammar generates no strings");
  std::vector<bool> live(total, false);
  live[g.start] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& b : binary) {
      if (live[b.lhs] && gen[b.left] && gen[b.right]) {
        if (!live[b.left]) live[b.left] = changed = true;
        if (!live[b.right]) live[b.right] = changed = true;
      }
    }
  }
  std::vector<NonterminalId> remap(total, 0);
  std::vector<std::string> kept;
  for (std::size_t v = 0; v < total; ++v) {
    if (live[v] && gen[v]) {
      remap[v] = static_cast<NonterminalId>(kept.size());
      kept.push_back(names[v]);
    }
  }
  std::vector<BinaryRule> kb;
  for (const auto& b : binary) {
    if (live[b.lhs] && gen[b.lhs] && gen[b.left] && gen[b.right]) {
      kb.push_back({remap[b.lhs], remap[b.left], remap[b.right]});
    }
  }
  std::vector<UnitRule> ku;
  for (const auto& u : unit) {
    if (live[u.lhs] && gen[u.lhs]) ku.push_back({remap[u.lhs], u.token});
  }
  return CnfGrammar(g.terminals, std::move(kept), std::move(kb), std::move(ku), remap[g.start]);
}

bool cyk_accepts(const CnfGrammar& g, std::span<const TokenId> sigma) {
  if (sigma.empty()) throw GrammarError("cyk_accepts: empty input (grammars are ε-free)");
  const std::size_t n = sigma.size();
  const std::size_t nv = g.num_nonterminals();
  // chart[i][j] = nonterminals deriving sigma[i..j), stored for j > i.
  std::vector<std::vector<std::vector<bool>>> chart(n + 1,
                                                     std::vector<std::vector<bool>>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma[i] >= g.num_terminals()) throw GrammarError("cyk_accepts: unknown token id");
    chart[i][i + 1].assign(nv, false);
    for (auto w : g.producers(sigma[i])) chart[i][i + 1][w] = true;
  }
  for (std::size_t span = 2; span <= n; ++span) {
    for (std::size_t i = 0; i + span <= n; ++i) {
      const std::size_t j = i + span;
      auto& cell = chart[i][j];
      cell.assign(nv, false);
      for (std::size_t k = i + 1; k < j; ++k) {
        const auto& left = chart[i][k];
        const auto& right = chart[k][j];
        for (NonterminalId x = 0; x < nv; ++x) {
          if (!left[x]) continue;
          for (const auto& [z, w] : g.by_left(x)) {
            if (right[z]) cell[w] = true;
          }
        }
      }
    }
  }
  return chart[0][n][g.start()];
}

}  // namespace synfix
