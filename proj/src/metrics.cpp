#include "cseval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace cseval {

using nlohmann::json;

namespace {

// Clipped n-gram match count and total prediction n-grams for one order.
std::pair<std::size_t, std::size_t> ngram_overlap(const Tokens& pred, const Tokens& ref,
                                                  std::size_t n) {
    if (pred.size() < n) return {0, 0};
    std::unordered_map<std::string, int> ref_counts;
    auto key = [](const Tokens& t, std::size_t i, std::size_t n) {
        std::string k;
        for (std::size_t j = 0; j < n; ++j) {
            k += t[i + j];
            k += '\x1f';
        }
        return k;
    };
    if (ref.size() >= n)
        for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[key(ref, i, n)];
    std::size_t total = pred.size() - n + 1;
    std::size_t matched = 0;
    for (std::size_t i = 0; i + n <= pred.size(); ++i) {
        auto it = ref_counts.find(key(pred, i, n));
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++matched;
        }
    }
    return {matched, total};
}

} // namespace

double bleu4(const Tokens& pred, const Tokens& ref) {
    if (pred.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        auto [matched, total] = ngram_overlap(pred, ref, n);
        double precision;
        if (total == 0)
            precision = 1.0; // prediction too short to form this order
        else if (n == 1)
            precision = static_cast<double>(matched) / static_cast<double>(total);
        else
            precision = static_cast<double>(matched + 1) / static_cast<double>(total + 1);
        if (precision == 0.0) return 0.0;
        log_sum += std::log(precision);
    }
    double bp = 1.0;
    if (pred.size() < ref.size())
        bp = std::exp(1.0 - static_cast<double>(ref.size()) /
                                static_cast<double>(pred.size()));
    return bp * std::exp(log_sum / 4.0);
}

namespace {

// Minimal chunk count over all maximum one-to-one alignments, found by
// branch and bound over prediction positions. Continuing the current chunk
// is explored first, so the budgeted search degrades toward a greedy
// contiguous alignment instead of an arbitrary one.
class ChunkSearch {
public:
    ChunkSearch(const Tokens& pred, const Tokens& ref) : pred_(pred), ref_(ref) {
        for (std::size_t j = 0; j < ref.size(); ++j) ref_free_[ref[j]].push_back(j);
        for (const auto& [tok, positions] : ref_free_) remaining_[tok] = positions.size();
        used_.assign(ref.size(), false);
        for (const std::string& tok : pred) {
            auto it = remaining_.find(tok);
            if (it != remaining_.end() && it->second > 0) {
                --it->second;
                ++target_;
            }
        }
        for (const auto& [tok, positions] : ref_free_) remaining_[tok] = positions.size();
    }

    std::size_t matches() const { return target_; }

    std::size_t min_chunks() {
        if (target_ == 0) return 0;
        best_ = greedy_chunks();
        if (best_ <= 1) return best_;
        // Suffix capacity: upper bound on matches from pred position i on.
        suffix_cap_.assign(pred_.size() + 1, 0);
        std::unordered_map<std::string, std::size_t> avail = remaining_;
        for (std::size_t i = pred_.size(); i-- > 0;) {
            suffix_cap_[i] = suffix_cap_[i + 1];
            auto it = avail.find(pred_[i]);
            if (it != avail.end() && it->second > 0) {
                --it->second;
                ++suffix_cap_[i];
            }
        }
        descend(0, 0, 0, kNone);
        return best_;
    }

private:
    // Feasible maximum alignment: left to right, prefer continuing the
    // current chunk, otherwise take the leftmost free occurrence.
    std::size_t greedy_chunks() {
        std::unordered_map<std::string, std::size_t> avail = remaining_;
        std::vector<bool> used(ref_.size(), false);
        std::size_t chunks = 0;
        std::size_t prev_ref = kNone;
        for (const std::string& tok : pred_) {
            auto it = avail.find(tok);
            if (it == avail.end() || it->second == 0) {
                prev_ref = kNone;
                continue;
            }
            std::size_t cont = prev_ref == kNone ? kNone : prev_ref + 1;
            std::size_t pick = kNone;
            if (cont != kNone && cont < ref_.size() && !used[cont] && ref_[cont] == tok) {
                pick = cont;
            } else {
                for (std::size_t j : ref_free_.at(tok)) {
                    if (!used[j]) {
                        pick = j;
                        break;
                    }
                }
                ++chunks;
            }
            used[pick] = true;
            --it->second;
            prev_ref = pick;
        }
        return chunks;
    }

    void descend(std::size_t pred_pos, std::size_t matched, std::size_t chunks,
                 std::size_t prev_ref) {
        if (budget_ == 0) return;
        --budget_;
        if (matched == target_) {
            best_ = std::min(best_, chunks);
            return;
        }
        if (pred_pos >= pred_.size()) return;
        if (matched + suffix_cap_[pred_pos] < target_) return;
        if (chunks >= best_) return;

        const std::string& tok = pred_[pred_pos];
        auto it = ref_free_.find(tok);
        if (it != ref_free_.end()) {
            // Try chunk continuation first.
            std::size_t cont = prev_ref == kNone ? kNone : prev_ref + 1;
            if (cont != kNone && cont < ref_.size() && !used_[cont] && ref_[cont] == tok) {
                used_[cont] = true;
                descend(pred_pos + 1, matched + 1, chunks, cont);
                used_[cont] = false;
            }
            for (std::size_t j : it->second) {
                if (used_[j] || j == cont) continue;
                if (chunks + 1 >= best_) break; // any new chunk is already too many
                used_[j] = true;
                descend(pred_pos + 1, matched + 1, chunks + 1, j);
                used_[j] = false;
            }
        }
        // Leave this prediction token unmatched.
        descend(pred_pos + 1, matched, chunks, kNone);
    }

    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    const Tokens& pred_;
    const Tokens& ref_;
    std::unordered_map<std::string, std::vector<std::size_t>> ref_free_;
    std::unordered_map<std::string, std::size_t> remaining_;
    std::vector<bool> used_;
    std::vector<std::size_t> suffix_cap_;
    std::size_t target_ = 0;
    std::size_t best_ = 0;
    long budget_ = 200000;
};

} // namespace

double meteor(const Tokens& pred, const Tokens& ref) {
    if (pred.empty() || ref.empty()) return 0.0;
    ChunkSearch search(pred, ref);
    std::size_t m = search.matches();
    if (m == 0) return 0.0;
    std::size_t chunks = search.min_chunks();
    double p = static_cast<double>(m) / static_cast<double>(pred.size());
    double r = static_cast<double>(m) / static_cast<double>(ref.size());
    double f = p * r / (0.9 * p + 0.1 * r);
    double frag = static_cast<double>(chunks) / static_cast<double>(m);
    double penalty = 0.5 * frag * frag * frag;
    return f * (1.0 - penalty);
}

Prf rouge_l(const Tokens& pred, const Tokens& ref) {
    if (pred.empty() || ref.empty()) return {};
    // Two-row LCS.
    std::vector<std::size_t> prev(ref.size() + 1, 0), cur(ref.size() + 1, 0);
    for (std::size_t i = 1; i <= pred.size(); ++i) {
        for (std::size_t j = 1; j <= ref.size(); ++j) {
            if (pred[i - 1] == ref[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    std::size_t lcs = prev[ref.size()];
    if (lcs == 0) return {};
    Prf out;
    out.precision = static_cast<double>(lcs) / static_cast<double>(pred.size());
    out.recall = static_cast<double>(lcs) / static_cast<double>(ref.size());
    out.f = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

double exact_match(const Tokens& pred, const Tokens& ref) {
    return pred == ref ? 1.0 : 0.0;
}

Prf set_match_prf(const Tokens& pred, const Tokens& gold) {
    if (pred.empty() || gold.empty()) return {};
    std::unordered_map<std::string, std::size_t> gold_counts;
    for (const std::string& t : gold) ++gold_counts[t];
    std::size_t m = 0;
    for (const std::string& t : pred) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++m;
        }
    }
    if (m == 0) return {};
    Prf out;
    out.precision = static_cast<double>(m) / static_cast<double>(pred.size());
    out.recall = static_cast<double>(m) / static_cast<double>(gold.size());
    out.f = 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

std::vector<std::string> metric_names(Task task) {
    if (task == Task::CommentGeneration)
        return {"bleu4", "meteor", "rouge_l_p", "rouge_l_r", "rouge_l_f", "exact_match"};
    return {"set_match_p", "set_match_r", "set_match_f", "exact_match"};
}

std::map<std::string, double> score_pair(Task task, const Tokens& pred,
                                         const Tokens& ref) {
    std::map<std::string, double> scores;
    if (task == Task::CommentGeneration) {
        scores["bleu4"] = bleu4(pred, ref);
        scores["meteor"] = meteor(pred, ref);
        Prf r = rouge_l(pred, ref);
        scores["rouge_l_p"] = r.precision;
        scores["rouge_l_r"] = r.recall;
        scores["rouge_l_f"] = r.f;
    } else {
        Prf s = set_match_prf(pred, ref);
        scores["set_match_p"] = s.precision;
        scores["set_match_r"] = s.recall;
        scores["set_match_f"] = s.f;
    }
    scores["exact_match"] = exact_match(pred, ref);
    return scores;
}

MetricReport evaluate_set(const std::vector<Tokens>& predictions, const SampleSet& set,
                          const Corpus& corpus, const std::string& model_id,
                          RunMode mode) {
    if (predictions.size() != set.size())
        throw std::runtime_error("evaluation set '" + set.label + "' has " +
                                 std::to_string(set.size()) + " samples but " +
                                 std::to_string(predictions.size()) + " predictions");
    MetricReport report;
    report.model_id = model_id;
    report.set_label = set.label;
    report.sample_count = set.size();
    if (set.empty()) return report;

    Task task = corpus.at(set.ids.front()).task;
    std::vector<std::string> names = metric_names(task);
    std::vector<std::vector<double>*> columns;
    for (const std::string& name : names) {
        report.per_sample[name].assign(set.size(), 0.0);
        columns.push_back(&report.per_sample[name]);
    }

    auto score_row = [&](std::size_t i) {
        const Sample& gold = corpus.at(set.ids[i]);
        auto scores = score_pair(task, predictions[i], gold.summary_subtokens);
        for (std::size_t k = 0; k < names.size(); ++k)
            (*columns[k])[i] = scores.at(names[k]);
    };

    const long n = static_cast<long>(set.size());
    if (mode == RunMode::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < n; ++i) score_row(static_cast<std::size_t>(i));
    } else {
        for (long i = 0; i < n; ++i) score_row(static_cast<std::size_t>(i));
    }

    for (const std::string& name : names) {
        const auto& values = report.per_sample[name];
        double sum = 0;
        for (double v : values) sum += v;
        report.aggregates[name] = sum / static_cast<double>(values.size());
    }
    return report;
}

std::string MetricReport::to_json() const {
    json j;
    j["model_id"] = model_id;
    j["set_label"] = set_label;
    j["sample_count"] = sample_count;
    j["aggregates"] = aggregates;
    j["per_sample"] = per_sample;
    return j.dump(2) + "\n";
}

MetricReport MetricReport::from_json(const std::string& text) {
    json j = json::parse(text);
    MetricReport report;
    report.model_id = j.at("model_id").get<std::string>();
    report.set_label = j.at("set_label").get<std::string>();
    report.sample_count = j.at("sample_count").get<std::size_t>();
    report.aggregates = j.at("aggregates").get<std::map<std::string, double>>();
    report.per_sample =
        j.at("per_sample").get<std::map<std::string, std::vector<double>>>();
    return report;
}

std::string MetricReport::to_csv() const {
    std::ostringstream out;
    out << "index";
    for (const auto& [name, values] : per_sample) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < sample_count; ++i) {
        out << i;
        for (const auto& [name, values] : per_sample) out << ',' << values[i];
        out << '\n';
    }
    return out.str();
}

} // namespace cseval
