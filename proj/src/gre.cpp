#include "synfix/gre.hpp"

#include <algorithm>
#include <random>

namespace synfix {

GreArena::GreArena() {
  nodes_.push_back({GreKind::Empty, 0, 0, false, false, false});
  index_.emplace(Key{GreKind::Empty, 0, 0}, 0);
  nodes_.push_back({GreKind::Epsilon, 0, 0, true, false, true});
  index_.emplace(Key{GreKind::Epsilon, 0, 0}, 1);
}

Gre GreArena::intern(Node n) {
  Key k{n.kind, n.a, n.b};
  auto it = index_.find(k);
  if (it != index_.end()) return {it->second};
  auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(n);
  index_.emplace(k, id);
  return {id};
}

Gre GreArena::atoms(std::vector<TokenId> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  if (tokens.empty()) throw GreError("atom set must be nonempty");
  std::uint32_t set_id;
  auto it = atom_index_.find(tokens);
  if (it != atom_index_.end()) {
    set_id = it->second;
  } else {
    set_id = static_cast<std::uint32_t>(atom_sets_.size());
    atom_sets_.push_back(tokens);
    atom_index_.emplace(std::move(tokens), set_id);
  }
  return intern({GreKind::Atoms, set_id, 0, false, false, false});
}

Gre GreArena::cat(Gre x, Gre z) {
  if (x == empty() || z == empty()) return empty();
  if (x == epsilon()) return z;
  if (z == epsilon()) return x;
  const auto& nx = nodes_[x.id];
  const auto& nz = nodes_[z.id];
  return intern({GreKind::Cat, x.id, z.id, nx.nullable && nz.nullable, nx.has_and || nz.has_and,
                 nx.has_eps || nz.has_eps});
}

Gre GreArena::alt(Gre x, Gre z) {
  if (x == empty()) return z;
  if (z == empty()) return x;
  const auto& nx = nodes_[x.id];
  const auto& nz = nodes_[z.id];
  return intern({GreKind::Or, x.id, z.id, nx.nullable || nz.nullable, nx.has_and || nz.has_and,
                 nx.has_eps || nz.has_eps});
}

Gre GreArena::conj(Gre x, Gre z) {
  if (x == empty() || z == empty()) return empty();
  const auto& nx = nodes_[x.id];
  const auto& nz = nodes_[z.id];
  return intern({GreKind::And, x.id, z.id, nx.nullable && nz.nullable, true,
                 nx.has_eps || nz.has_eps});
}

Gre GreArena::alt_all(std::span<const Gre> terms) {
  if (terms.empty()) return empty();
  if (terms.size() == 1) return terms[0];
  const auto mid = terms.size() / 2;
  Gre l = alt_all(terms.first(mid));
  Gre r = alt_all(terms.subspan(mid));
  return alt(l, r);
}

Gre GreArena::word(std::span<const TokenId> tokens) {
  Gre out = epsilon();
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) out = cat(atom(*it), out);
  return out;
}

std::span<const TokenId> GreArena::tokens(Gre e) const {
  const auto& n = nodes_.at(e.id);
  if (n.kind != GreKind::Atoms) return {};
  return atom_sets_[n.a];
}

Gre GreArena::derivative(Gre e, TokenId a) {
  const std::uint64_t key = (std::uint64_t{e.id} << 32) | a;
  if (auto it = deriv_memo_.find(key); it != deriv_memo_.end()) return {it->second};
  const Node n = nodes_[e.id];
  Gre out = empty();
  switch (n.kind) {
    case GreKind::Empty:
    case GreKind::Epsilon:
      break;
    case GreKind::Atoms: {
      const auto& s = atom_sets_[n.a];
      if (std::binary_search(s.begin(), s.end(), a)) out = epsilon();
      break;
    }
    case GreKind::Cat: {
      Gre head = cat(derivative({n.a}, a), {n.b});
      out = nodes_[n.a].nullable ? alt(head, derivative({n.b}, a)) : head;
      break;
    }
    case GreKind::Or:
      out = alt(derivative({n.a}, a), derivative({n.b}, a));
      break;
    case GreKind::And:
      out = conj(derivative({n.a}, a), derivative({n.b}, a));
      break;
  }
  deriv_memo_.emplace(key, out.id);
  return out;
}

Gre GreArena::derivative(Gre e, std::span<const TokenId> prefix) {
  for (auto a : prefix) {
    if (e == empty()) break;
    e = derivative(e, a);
  }
  return e;
}

const std::vector<TokenId>& GreArena::follow(Gre e) {
  if (auto it = follow_memo_.find(e.id); it != follow_memo_.end()) return it->second;
  const Node n = nodes_[e.id];
  std::vector<TokenId> out;
  switch (n.kind) {
    case GreKind::Empty:
      throw GreError("follow of the empty language");
    case GreKind::And:
      throw GreError("follow is undefined for conjunction");
    case GreKind::Epsilon:
      break;
    case GreKind::Atoms:
      out = atom_sets_[n.a];
      break;
    case GreKind::Cat: {
      out = follow({n.a});
      if (nodes_[n.a].nullable) {
        const auto& fz = follow({n.b});
        std::vector<TokenId> merged;
        std::set_union(out.begin(), out.end(), fz.begin(), fz.end(), std::back_inserter(merged));
        out = std::move(merged);
      }
      break;
    }
    case GreKind::Or: {
      const auto& fx = follow({n.a});
      const auto& fz = follow({n.b});
      std::set_union(fx.begin(), fx.end(), fz.begin(), fz.end(), std::back_inserter(out));
      break;
    }
  }
  return follow_memo_.emplace(e.id, std::move(out)).first->second;
}

const BigNat& GreArena::tree_count(Gre e) {
  if (auto it = count_memo_.find(e.id); it != count_memo_.end()) return it->second;
  const Node n = nodes_[e.id];
  BigNat out;
  switch (n.kind) {
    case GreKind::Empty: out = 0; break;
    case GreKind::Epsilon: out = 1; break;
    case GreKind::Atoms: out = atom_sets_[n.a].size(); break;
    case GreKind::Cat: out = tree_count({n.a}) * tree_count({n.b}); break;
    case GreKind::Or: out = tree_count({n.a}) + tree_count({n.b}); break;
    case GreKind::And: throw GreError("tree_count is undefined for conjunction");
  }
  return count_memo_.emplace(e.id, std::move(out)).first->second;
}

bool matches(GreArena& arena, Gre e, std::span<const TokenId> sigma) {
  return arena.nullable(arena.derivative(e, sigma));
}

Selector first_selector() {
  return [](std::size_t) -> std::size_t { return 0; };
}

Selector random_selector(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](std::size_t n) -> std::size_t {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(*rng);
  };
}

namespace {

void choose_into(GreArena& arena, Gre e, const Selector& pick, TokenSeq& out) {
  switch (arena.kind(e)) {
    case GreKind::Empty:
      throw GreError("choose from the empty language");
    case GreKind::And:
      throw GreError("choose is undefined for conjunction");
    case GreKind::Epsilon:
      return;
    case GreKind::Atoms: {
      auto s = arena.tokens(e);
      out.push_back(s[pick(s.size())]);
      return;
    }
    case GreKind::Cat: {
      // A nullable residual may stop here or continue.
      const auto& f = arena.follow(e);
      if (arena.nullable(e)) {
        if (f.empty() || pick(2) == 0) return;
      }
      const TokenId s = f[pick(f.size())];
      out.push_back(s);
      choose_into(arena, arena.derivative(e, s), pick, out);
      return;
    }
    case GreKind::Or: {
      Gre branch = pick(2) == 0 ? arena.left(e) : arena.right(e);
      choose_into(arena, branch, pick, out);
      return;
    }
  }
}

void enumerate_into(GreArena& arena, Gre e, BigNat n, TokenSeq& out) {
  while (true) {
    switch (arena.kind(e)) {
      case GreKind::Empty:
        throw GreError("enumerate: index out of range");
      case GreKind::And:
        throw GreError("enumerate is undefined for conjunction");
      case GreKind::Epsilon:
        return;
      case GreKind::Atoms: {
        auto s = arena.tokens(e);
        out.push_back(s[static_cast<std::size_t>(n)]);
        return;
      }
      case GreKind::Cat: {
        const BigNat& right_count = arena.tree_count(arena.right(e));
        enumerate_into(arena, arena.left(e), n / right_count, out);
        n = n % right_count;
        e = arena.right(e);
        break;
      }
      case GreKind::Or: {
        const BigNat& left_count = arena.tree_count(arena.left(e));
        if (n < left_count) {
          e = arena.left(e);
        } else {
          n -= left_count;
          e = arena.right(e);
        }
        break;
      }
    }
  }
}

}  // namespace

TokenSeq choose(GreArena& arena, Gre e, const Selector& pick) {
  if (arena.has_conj(e)) throw GreError("choose is undefined for conjunction");
  TokenSeq out;
  choose_into(arena, e, pick, out);
  return out;
}

TokenSeq enumerate_tree(GreArena& arena, Gre e, const BigNat& n) {
  if (arena.has_conj(e)) throw GreError("enumerate is undefined for conjunction");
  if (n < 0 || n >= arena.tree_count(e)) throw GreError("enumerate: index out of range");
  TokenSeq out;
  enumerate_into(arena, e, n, out);
  return out;
}

namespace {

void escape_into(const std::string& label, std::string& out) {
  for (char c : label) {
    if (c == '\\' || c == '{' || c == '}' || c == ',') out += '\\';
    out += c;
  }
}

void render(const GreArena& arena, Gre e, const Alphabet& alphabet, std::string& out) {
  switch (arena.kind(e)) {
    case GreKind::Empty: out += "∅"; return;
    case GreKind::Epsilon: out += "ε"; return;
    case GreKind::Atoms: {
      out += '{';
      bool first = true;
      for (auto t : arena.tokens(e)) {
        if (!first) out += ',';
        first = false;
        escape_into(alphabet.label(t), out);
      }
      out += '}';
      return;
    }
    case GreKind::Cat:
    case GreKind::Or:
    case GreKind::And: {
      const char* op = arena.kind(e) == GreKind::Cat ? " · " : arena.kind(e) == GreKind::Or ? " ∨ " : " ∧ ";
      out += '(';
      render(arena, arena.left(e), alphabet, out);
      out += op;
      render(arena, arena.right(e), alphabet, out);
      out += ')';
      return;
    }
  }
}

class GreParser {
 public:
  GreParser(GreArena& arena, const Alphabet& alphabet, std::string_view text)
      : arena_(arena), alphabet_(alphabet), text_(text) {}

  Gre parse() {
    Gre e = term();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw GreError("parse_gre: " + what + " at offset " + std::to_string(pos_));
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  Gre term() {
    if (eat("∅")) return arena_.empty();
    if (eat("ε")) return arena_.epsilon();
    if (eat("{")) return atom_set();
    if (eat("(")) {
      Gre l = term();
      GreKind op;
      if (eat("·")) {
        op = GreKind::Cat;
      } else if (eat("∨")) {
        op = GreKind::Or;
      } else if (eat("∧")) {
        op = GreKind::And;
      } else {
        fail("expected operator");
      }
      Gre r = term();
      if (!eat(")")) fail("expected ')'");
      if (op == GreKind::Cat) return arena_.cat(l, r);
      if (op == GreKind::Or) return arena_.alt(l, r);
      return arena_.conj(l, r);
    }
    fail("expected term");
  }

  Gre atom_set() {
    std::vector<TokenId> toks;
    std::string cur;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated atom set");
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("dangling escape");
        cur += text_[pos_++];
      } else if (c == ',' || c == '}') {
        if (cur.empty()) fail("empty token in atom set");
        toks.push_back(alphabet_.id(cur));
        cur.clear();
        if (c == '}') break;
      } else {
        cur += c;
      }
    }
    return arena_.atoms(std::move(toks));
  }

  GreArena& arena_;
  const Alphabet& alphabet_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const GreArena& arena, Gre e, const Alphabet& alphabet) {
  std::string out;
  render(arena, e, alphabet, out);
  return out;
}

Gre parse_gre(GreArena& arena, const Alphabet& alphabet, std::string_view text) {
  return GreParser(arena, alphabet, text).parse();
}

Cfg regex_to_cfg(const GreArena& arena, Gre e, const Alphabet& alphabet) {
  Cfg g;
  g.terminals = alphabet;
  std::unordered_map<std::uint32_t, NonterminalId> nt;
  std::vector<Gre> order;
  // Assign nonterminals in preorder so the root is the start symbol.
  std::vector<Gre> stack{e};
  while (!stack.empty()) {
    Gre cur = stack.back();
    stack.pop_back();
    if (nt.count(cur.id)) continue;
    switch (arena.kind(cur)) {
      case GreKind::Empty: throw GreError("regex_to_cfg: term contains ∅");
      case GreKind::Epsilon: throw GreError("regex_to_cfg: term contains ε");
      case GreKind::And: throw GreError("regex_to_cfg: term contains ∧");
      default: break;
    }
    nt.emplace(cur.id, static_cast<NonterminalId>(g.nonterminals.size()));
    g.nonterminals.push_back("E" + std::to_string(cur.id));
    order.push_back(cur);
    if (arena.kind(cur) == GreKind::Cat || arena.kind(cur) == GreKind::Or) {
      stack.push_back(arena.right(cur));
      stack.push_back(arena.left(cur));
    }
  }
  for (Gre cur : order) {
    const NonterminalId lhs = nt.at(cur.id);
    switch (arena.kind(cur)) {
      case GreKind::Atoms:
        for (auto t : arena.tokens(cur)) g.productions.push_back({lhs, {Symbol{true, t}}});
        break;
      case GreKind::Cat:
        g.productions.push_back({lhs, {Symbol{false, nt.at(arena.left(cur).id)},
                                       Symbol{false, nt.at(arena.right(cur).id)}}});
        break;
      case GreKind::Or:
        g.productions.push_back({lhs, {Symbol{false, nt.at(arena.left(cur).id)}}});
        g.productions.push_back({lhs, {Symbol{false, nt.at(arena.right(cur).id)}}});
        break;
      default:
        break;
    }
  }
  g.start = nt.at(e.id);
  g.validate();
  return g;
}

}  // namespace synfix
