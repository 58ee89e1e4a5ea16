#include "synfix/builtin.hpp"

#include <algorithm>
#include <utility>

namespace synfix {
namespace {

constexpr std::pair<std::string_view, std::string_view> kGrammars[] = {
#include "builtin_grammars.inc"
};

}  // namespace

std::vector<std::string> builtin_grammar_names() {
  std::vector<std::string> out;
  for (const auto& [name, body] : kGrammars) out.emplace_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string_view> builtin_grammar(std::string_view name) {
  for (const auto& [n, body] : kGrammars)
    if (n == name) return body;
  return std::nullopt;
}

}  // namespace synfix
