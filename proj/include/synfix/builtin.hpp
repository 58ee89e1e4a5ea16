#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synfix {

/// Names of the grammars compiled into the library, sorted.
std::vector<std::string> builtin_grammar_names();
std::optional<std::string_view> builtin_grammar(std::string_view name);

}  // namespace synfix
