#include "cseval/subtoken.hpp"

#include <cctype>

namespace cseval {

namespace {

enum class Kind { Lower, Upper, Digit, Other };

Kind kind_of(unsigned char c) {
    if (std::isdigit(c)) return Kind::Digit;
    if (std::isupper(c)) return Kind::Upper;
    if (std::islower(c)) return Kind::Lower;
    return Kind::Other;
}

} // namespace

std::vector<std::string> subtokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    Kind prev = Kind::Other;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };

    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        Kind k = kind_of(c);
        if (k == Kind::Other) {
            flush();
            prev = Kind::Other;
            continue;
        }
        if (!cur.empty()) {
            if (prev == Kind::Lower && k == Kind::Upper) {
                flush();
            } else if ((prev == Kind::Digit) != (k == Kind::Digit)) {
                flush();
            } else if (prev == Kind::Upper && k == Kind::Lower && cur.size() >= 2) {
                // Acronym run followed by a word: the last capital starts
                // the new subtoken ("HTTPServer" -> http server).
                char carry = cur.back();
                cur.pop_back();
                flush();
                cur.push_back(carry);
            }
        }
        cur.push_back(static_cast<char>(std::tolower(c)));
        prev = k;
    }
    flush();
    return out;
}

std::string join_subtokens(const std::vector<std::string>& subtokens,
                           std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < subtokens.size(); ++i) {
        if (i) out.append(sep);
        out.append(subtokens[i]);
    }
    return out;
}

} // namespace cseval
