#include "synfix/automata.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>
#include <queue>
#include <sstream>

namespace synfix {

SymbolicNfa::SymbolicNfa(std::size_t num_states, std::vector<Arc> arcs, StateId initial,
                         std::vector<StateId> finals,
                         std::vector<std::optional<LevCoord>> coords)
    : num_states_(num_states),
      arcs_(std::move(arcs)),
      initial_(initial),
      finals_(std::move(finals)),
      coords_(std::move(coords)) {
  if (num_states_ == 0) throw AutomatonError("automaton needs at least one state");
  if (initial_ >= num_states_) throw AutomatonError("initial state out of range");
  if (coords_.empty()) coords_.assign(num_states_, std::nullopt);
  if (coords_.size() != num_states_) throw AutomatonError("coordinate table size mismatch");
  for (const auto& a : arcs_) {
    if (a.src >= num_states_ || a.dst >= num_states_) throw AutomatonError("arc out of range");
  }
  std::sort(arcs_.begin(), arcs_.end());
  arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
  std::sort(finals_.begin(), finals_.end());
  finals_.erase(std::unique(finals_.begin(), finals_.end()), finals_.end());
  is_final_.assign(num_states_, false);
  for (auto f : finals_) {
    if (f >= num_states_) throw AutomatonError("final state out of range");
    is_final_[f] = true;
  }
}

bool SymbolicNfa::is_ordered() const {
  if (initial_ != 0) return false;
  return std::all_of(arcs_.begin(), arcs_.end(), [](const Arc& a) { return a.src < a.dst; });
}

std::optional<StateId> SymbolicNfa::find(LevCoord c) const {
  for (StateId q = 0; q < num_states_; ++q) {
    if (coords_[q] && *coords_[q] == c) return q;
  }
  return std::nullopt;
}

std::string SymbolicNfa::to_text(const Alphabet& alphabet) const {
  std::ostringstream os;
  os << "# states " << num_states_ << '\n';
  os << "initial " << initial_ << '\n';
  os << "final";
  for (auto f : finals_) os << ' ' << f;
  os << '\n';
  for (StateId q = 0; q < num_states_; ++q) {
    if (coords_[q]) os << "# q" << q << " = (" << coords_[q]->i << ", " << coords_[q]->j << ")\n";
  }
  for (const auto& a : arcs_) {
    os << a.src << "  ";
    switch (a.pred.kind) {
      case Predicate::Kind::Equals: os << '=' << alphabet.label(a.pred.token); break;
      case Predicate::Kind::NotEquals: os << '!' << alphabet.label(a.pred.token); break;
      case Predicate::Kind::Any: os << '*'; break;
    }
    os << "  " << a.dst << '\n';
  }
  return os.str();
}

BoolMatrix::BoolMatrix(std::size_t n) : n_(n), wpr_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

bool BoolMatrix::strictly_upper_triangular() const {
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c <= r; ++c)
      if (get(r, c)) return false;
  return true;
}

BoolMatrix BoolMatrix::transpose() const {
  BoolMatrix t(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c)
      if (get(r, c)) t.set(c, r);
  return t;
}

BoolMatrix BoolMatrix::multiply(const BoolMatrix& other) const {
  BoolMatrix out(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    auto dst = out.row(r);
    for (std::size_t w = 0; w < wpr_; ++w) {
      std::uint64_t bits = bits_[r * wpr_ + w];
      while (bits) {
        const std::size_t k = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        auto src = other.row(k);
        for (std::size_t x = 0; x < wpr_; ++x) dst[x] |= src[x];
      }
    }
  }
  return out;
}

std::string BoolMatrix::to_text() const {
  std::string out;
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) out += get(r, c) ? "■" : "□";
    out += '\n';
  }
  return out;
}

SymbolicNfa lev_build(std::span<const TokenId> sigma, std::uint32_t max_dist, LevArcs kind) {
  if (sigma.empty()) throw AutomatonError("lev_build: empty input string");
  const std::uint32_t n = static_cast<std::uint32_t>(sigma.size());
  const std::uint32_t d = max_dist;

  std::vector<LevCoord> order;
  for (std::uint32_t i = 0; i <= n; ++i)
    for (std::uint32_t j = 0; j <= d; ++j) order.push_back({i, j});
  std::stable_sort(order.begin(), order.end(), [](LevCoord a, LevCoord b) {
    if (a.i + a.j != b.i + b.j) return a.i + a.j < b.i + b.j;
    return a.i < b.i;
  });
  std::vector<StateId> id((n + 1) * (d + 1));
  std::vector<std::optional<LevCoord>> coords;
  for (StateId q = 0; q < order.size(); ++q) {
    id[order[q].i * (d + 1) + order[q].j] = q;
    coords.emplace_back(order[q]);
  }
  auto at = [&](std::uint32_t i, std::uint32_t j) { return id[i * (d + 1) + j]; };
  auto tok = [&](std::uint32_t i) { return sigma[i - 1]; };  // 1-indexed
  auto other = [&](std::uint32_t i) {
    return kind == LevArcs::Symbolic ? Predicate::ne(tok(i)) : Predicate::any();
  };

  std::vector<Arc> arcs;
  for (std::uint32_t i = 0; i <= n; ++i) {
    for (std::uint32_t j = 1; j <= d; ++j) {
      // Insertion. Past the end there is no next token to exclude.
      arcs.push_back({at(i, j - 1), i < n ? other(i + 1) : Predicate::any(), at(i, j)});
    }
  }
  for (std::uint32_t i = 1; i <= n; ++i) {
    for (std::uint32_t j = 1; j <= d; ++j) {
      arcs.push_back({at(i - 1, j - 1), other(i), at(i, j)});  // substitution
    }
    for (std::uint32_t j = 0; j <= d; ++j) {
      arcs.push_back({at(i - 1, j), Predicate::eq(tok(i)), at(i, j)});  // match
    }
  }
  for (std::uint32_t k = 1; k <= d; ++k) {
    for (std::uint32_t i = k + 1; i <= n; ++i) {
      for (std::uint32_t j = k; j <= d; ++j) {
        // Delete k tokens, then match σ_i.
        arcs.push_back({at(i - k - 1, j - k), Predicate::eq(tok(i)), at(i, j)});
      }
    }
  }
  std::vector<StateId> finals;
  for (std::uint32_t i = 0; i <= n; ++i)
    for (std::uint32_t j = 0; j <= d; ++j)
      if (n - i + j <= d) finals.push_back(at(i, j));
  return SymbolicNfa(order.size(), std::move(arcs), at(0, 0), std::move(finals), std::move(coords));
}

SymbolicNfa singleton_nfa(std::span<const TokenId> sigma) {
  if (sigma.empty()) throw AutomatonError("singleton_nfa: empty input string");
  std::vector<Arc> arcs;
  for (StateId i = 0; i < sigma.size(); ++i) arcs.push_back({i, Predicate::eq(sigma[i]), i + 1});
  return SymbolicNfa(sigma.size() + 1, std::move(arcs), 0, {static_cast<StateId>(sigma.size())});
}

SymbolicNfa template_nfa(const PorousSeq& porous) {
  if (porous.empty()) throw AutomatonError("template_nfa: empty template");
  std::vector<Arc> arcs;
  for (StateId i = 0; i < porous.size(); ++i) {
    arcs.push_back({i, porous[i] ? Predicate::eq(*porous[i]) : Predicate::any(), i + 1});
  }
  return SymbolicNfa(porous.size() + 1, std::move(arcs), 0, {static_cast<StateId>(porous.size())});
}

PorousSeq parse_porous(const Alphabet& alphabet, std::string_view text) {
  PorousSeq out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      auto w = text.substr(i, j - i);
      if (w == "_") {
        out.emplace_back(std::nullopt);
      } else {
        out.emplace_back(alphabet.id(w));
      }
    }
    i = j;
  }
  return out;
}

namespace {

SymbolicNfa renumber(const SymbolicNfa& a, const std::vector<StateId>& order) {
  // order[k] = old id of the k-th new state.
  std::vector<StateId> pos(a.num_states(), static_cast<StateId>(-1));
  for (StateId k = 0; k < order.size(); ++k) pos[order[k]] = k;
  std::vector<Arc> arcs;
  for (const auto& arc : a.arcs()) {
    if (pos[arc.src] == static_cast<StateId>(-1) || pos[arc.dst] == static_cast<StateId>(-1)) continue;
    arcs.push_back({pos[arc.src], arc.pred, pos[arc.dst]});
  }
  std::vector<StateId> finals;
  for (auto f : a.finals())
    if (pos[f] != static_cast<StateId>(-1)) finals.push_back(pos[f]);
  std::vector<std::optional<LevCoord>> coords;
  for (auto old : order) coords.push_back(a.coord(old));
  return SymbolicNfa(order.size(), std::move(arcs), pos[a.initial()], std::move(finals),
                     std::move(coords));
}

std::vector<bool> forward_reachable(const SymbolicNfa& a) {
  std::vector<std::vector<StateId>> succ(a.num_states());
  for (const auto& arc : a.arcs()) succ[arc.src].push_back(arc.dst);
  std::vector<bool> seen(a.num_states(), false);
  std::vector<StateId> stack{a.initial()};
  seen[a.initial()] = true;
  while (!stack.empty()) {
    auto q = stack.back();
    stack.pop_back();
    for (auto r : succ[q]) {
      if (!seen[r]) {
        seen[r] = true;
        stack.push_back(r);
      }
    }
  }
  return seen;
}

}  // namespace

SymbolicNfa order_states(const SymbolicNfa& a) {
  const auto live = forward_reachable(a);
  const bool lev = std::all_of(a.coords().begin(), a.coords().end(),
                               [](const auto& c) { return c.has_value(); });
  std::vector<StateId> order;
  if (lev) {
    for (StateId q = 0; q < a.num_states(); ++q)
      if (live[q]) order.push_back(q);
    std::stable_sort(order.begin(), order.end(), [&](StateId x, StateId y) {
      auto cx = *a.coord(x), cy = *a.coord(y);
      if (cx.i + cx.j != cy.i + cy.j) return cx.i + cx.j < cy.i + cy.j;
      return cx.i < cy.i;
    });
  } else {
    std::vector<std::size_t> indeg(a.num_states(), 0);
    std::vector<std::vector<StateId>> succ(a.num_states());
    for (const auto& arc : a.arcs()) {
      if (!live[arc.src]) continue;
      succ[arc.src].push_back(arc.dst);
      ++indeg[arc.dst];
    }
    std::priority_queue<StateId, std::vector<StateId>, std::greater<>> ready;
    std::size_t live_count = 0;
    for (StateId q = 0; q < a.num_states(); ++q) {
      if (!live[q]) continue;
      ++live_count;
      if (indeg[q] == 0) ready.push(q);
    }
    while (!ready.empty()) {
      auto q = ready.top();
      ready.pop();
      order.push_back(q);
      for (auto r : succ[q])
        if (--indeg[r] == 0) ready.push(r);
    }
    if (order.size() != live_count) throw AutomatonError("order_states: automaton has a cycle");
  }
  auto out = renumber(a, order);
  if (!out.is_ordered()) throw AutomatonError("order_states: automaton has a cycle");
  return out;
}

SymbolicNfa remove_states(const SymbolicNfa& a, const std::vector<StateId>& doomed) {
  std::vector<bool> drop(a.num_states(), false);
  for (auto q : doomed) drop.at(q) = true;
  if (drop[a.initial()]) throw AutomatonError("remove_states: cannot remove the initial state");
  std::vector<StateId> order;
  for (StateId q = 0; q < a.num_states(); ++q)
    if (!drop[q]) order.push_back(q);
  return renumber(a, order);
}

SymbolicNfa trim(const SymbolicNfa& a) {
  const auto fwd = forward_reachable(a);
  std::vector<std::vector<StateId>> pred(a.num_states());
  for (const auto& arc : a.arcs()) pred[arc.dst].push_back(arc.src);
  std::vector<bool> bwd(a.num_states(), false);
  std::vector<StateId> stack(a.finals().begin(), a.finals().end());
  for (auto f : stack) bwd[f] = true;
  while (!stack.empty()) {
    auto q = stack.back();
    stack.pop_back();
    for (auto p : pred[q]) {
      if (!bwd[p]) {
        bwd[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<StateId> order;
  for (StateId q = 0; q < a.num_states(); ++q)
    if ((fwd[q] && bwd[q]) || q == a.initial()) order.push_back(q);
  return renumber(a, order);
}

BoolMatrix adjacency(const SymbolicNfa& a) {
  BoolMatrix m(a.num_states());
  for (const auto& arc : a.arcs()) m.set(arc.src, arc.dst);
  return m;
}

BoolMatrix reachability(const BoolMatrix& m) {
  BoolMatrix r = m;
  for (std::size_t q = 0; q < r.size(); ++q) r.set(q, q);
  // Paths double in length each round, so ⌈log₂ n⌉ rounds suffice.
  while (true) {
    BoolMatrix next = r.multiply(r);
    if (next == r) return r;
    r = std::move(next);
  }
}

BoolMatrix strict_reachability(const BoolMatrix& adj) {
  return adj.multiply(reachability(adj));
}

bool nfa_accepts(const SymbolicNfa& a, std::span<const TokenId> sigma) {
  std::vector<bool> cur(a.num_states(), false);
  cur[a.initial()] = true;
  for (auto s : sigma) {
    std::vector<bool> next(a.num_states(), false);
    bool any = false;
    for (const auto& arc : a.arcs()) {
      if (cur[arc.src] && arc.pred.accepts(s)) next[arc.dst] = any = true;
    }
    if (!any) return false;
    cur = std::move(next);
  }
  for (auto f : a.finals())
    if (cur[f]) return true;
  return false;
}

SymbolicNfa concretize(const SymbolicNfa& a, std::size_t alphabet_size) {
  std::vector<Arc> arcs;
  for (const auto& arc : a.arcs()) {
    for (TokenId s = 0; s < alphabet_size; ++s) {
      if (arc.pred.accepts(s)) arcs.push_back({arc.src, Predicate::eq(s), arc.dst});
    }
  }
  return SymbolicNfa(a.num_states(), std::move(arcs), a.initial(), a.finals(), a.coords());
}

}  // namespace synfix
