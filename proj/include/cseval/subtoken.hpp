#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cseval {

// Splits an identifier or sentence into lowercase subtokens. Boundaries:
// non-alphanumeric separators, camelCase humps (including the last capital
// of an acronym run, "HTTPServer" -> http server), and letter/digit
// transitions. Empty pieces are dropped, order is kept.
std::vector<std::string> subtokenize(std::string_view text);

std::string join_subtokens(const std::vector<std::string>& subtokens,
                           std::string_view sep = " ");

} // namespace cseval
