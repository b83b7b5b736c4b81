// Test-only brute-force oracles, kept independent of the library's metric
// implementations: n-grams are enumerated as token vectors in ordered maps,
// the LCS uses the full quadratic matrix, set match counts multisets.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cseval/metrics.hpp"

namespace cseval::oracles {

inline double bleu4_oracle(const Tokens& pred, const Tokens& ref) {
    if (pred.empty()) return 0.0;
    double product = 1.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::map<std::vector<std::string>, int> pred_grams, ref_grams;
        for (std::size_t i = 0; i + n <= pred.size(); ++i)
            ++pred_grams[{pred.begin() + i, pred.begin() + i + n}];
        for (std::size_t i = 0; i + n <= ref.size(); ++i)
            ++ref_grams[{ref.begin() + i, ref.begin() + i + n}];
        int matched = 0, total = 0;
        for (const auto& [gram, count] : pred_grams) {
            total += count;
            auto it = ref_grams.find(gram);
            if (it != ref_grams.end()) matched += std::min(count, it->second);
        }
        double p;
        if (total == 0)
            p = 1.0;
        else if (n == 1)
            p = double(matched) / double(total);
        else
            p = double(matched + 1) / double(total + 1);
        product *= p;
    }
    double bp = pred.size() < ref.size()
                    ? std::exp(1.0 - double(ref.size()) / double(pred.size()))
                    : 1.0;
    return bp * std::pow(product, 0.25);
}

inline Prf rouge_oracle(const Tokens& pred, const Tokens& ref) {
    if (pred.empty() || ref.empty()) return {};
    std::vector<std::vector<int>> dp(pred.size() + 1, std::vector<int>(ref.size() + 1, 0));
    for (std::size_t i = 1; i <= pred.size(); ++i)
        for (std::size_t j = 1; j <= ref.size(); ++j)
            dp[i][j] = pred[i - 1] == ref[j - 1]
                           ? dp[i - 1][j - 1] + 1
                           : std::max(dp[i - 1][j], dp[i][j - 1]);
    int lcs = dp[pred.size()][ref.size()];
    if (lcs == 0) return {};
    Prf out;
    out.precision = double(lcs) / double(pred.size());
    out.recall = double(lcs) / double(ref.size());
    out.f = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

inline Prf set_match_oracle(const Tokens& pred, const Tokens& gold) {
    if (pred.empty() || gold.empty()) return {};
    std::map<std::string, int> pc, gc;
    for (const auto& t : pred) ++pc[t];
    for (const auto& t : gold) ++gc[t];
    int m = 0;
    for (const auto& [t, c] : pc)
        if (gc.count(t)) m += std::min(c, gc.at(t));
    if (m == 0) return {};
    Prf out;
    out.precision = double(m) / double(pred.size());
    out.recall = double(m) / double(gold.size());
    out.f = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

} // namespace cseval::oracles
