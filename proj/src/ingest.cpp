#include "cseval/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "cseval/subtoken.hpp"
#include "json.hpp"

namespace cseval {

using nlohmann::json;

std::string FilterReport::to_json() const {
    json j;
    j["non_english_code"] = non_english_code;
    j["non_english_comment"] = non_english_comment;
    j["code_too_long"] = code_too_long;
    j["empty_body"] = empty_body;
    j["empty_comment"] = empty_comment;
    j["retained"] = retained;
    return j.dump(2) + "\n";
}

std::string CorpusStats::to_json() const {
    json j;
    j["task"] = to_string(task);
    j["num_samples"] = num_samples;
    j["avg_code_subtokens"] = avg_code_subtokens;
    j["avg_summary_subtokens"] = avg_summary_subtokens;
    json code = json::object(), summary = json::object();
    for (int i = 0; i < 3; ++i) {
        code["within_" + std::to_string(code_thresholds[i])] = code_fraction_within[i];
        summary["within_" + std::to_string(summary_thresholds[i])] =
            summary_fraction_within[i];
    }
    j["code_subtokens_fraction"] = code;
    j["summary_subtokens_fraction"] = summary;
    return j.dump(2) + "\n";
}

bool is_english_text(const std::string& text) {
    for (unsigned char c : text) {
        if (c == '\t' || c == '\n' || c == '\r') continue;
        if (c < 0x20 || c > 0x7e) return false;
    }
    return true;
}

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Body text between the first top-level '{' and its match; no '{' means
// no body (abstract/interface method).
bool has_nonempty_body(const std::string& code) {
    std::size_t open = code.find('{');
    if (open == std::string::npos) return false;
    int depth = 0;
    for (std::size_t i = open; i < code.size(); ++i) {
        char c = code[i];
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return false; // reached the match: only braces/space seen
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            return true;
        }
    }
    return false;
}

} // namespace

std::string strip_doc_tags(const std::string& text, const FilterOptions& opts) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '{' && i + 1 < text.size() && text[i + 1] == '@') {
            std::size_t name_begin = i + 2;
            std::size_t p = name_begin;
            while (p < text.size() && is_ident_char(text[p])) ++p;
            std::string tag = text.substr(name_begin, p - name_begin);
            std::size_t close = text.find('}', p);
            if (close == std::string::npos) break; // unterminated tag: drop the rest
            bool drop = std::find(opts.drop_tags.begin(), opts.drop_tags.end(), tag) !=
                        opts.drop_tags.end();
            if (!drop) {
                std::string payload = text.substr(p, close - p);
                std::size_t start = payload.find_first_not_of(" \t");
                if (start != std::string::npos) out += payload.substr(start);
            }
            i = close + 1;
            continue;
        }
        if (c == '<') {
            std::size_t close = text.find('>', i);
            if (close != std::string::npos && close - i <= 32) {
                i = close + 1;
                continue;
            }
        }
        if (c == '@' && (i == 0 || std::isspace(static_cast<unsigned char>(text[i - 1])))) {
            // Block tag section (@param, @return, ...): description ends here.
            break;
        }
        out += c;
        ++i;
    }
    std::size_t begin = out.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    std::size_t end = out.find_last_not_of(" \t\r\n");
    return out.substr(begin, end - begin + 1);
}

std::pair<Corpus, FilterReport> filter_corpus(const Corpus& corpus,
                                              const FilterOptions& opts) {
    FilterReport report;
    std::vector<Sample> kept;
    kept.reserve(corpus.samples.size());
    for (const Sample& s : corpus.samples) {
        if (!is_english_text(s.code)) {
            ++report.non_english_code;
        } else if (!is_english_text(s.summary)) {
            ++report.non_english_comment;
        } else if (s.code.size() > opts.max_code_chars) {
            ++report.code_too_long;
        } else if (!has_nonempty_body(s.code)) {
            ++report.empty_body;
        } else if (subtokenize(strip_doc_tags(s.summary, opts)).empty()) {
            ++report.empty_comment;
        } else {
            kept.push_back(s);
            ++report.retained;
        }
    }
    return {Corpus::from_samples(std::move(kept), corpus.tau), report};
}

Sample mask_method_name(const Sample& sample) {
    if (sample.name.empty())
        throw std::runtime_error("sample '" + sample.id + "' has no method name to mask");
    const std::string& name = sample.name;
    std::string masked;
    masked.reserve(sample.code.size());
    std::size_t i = 0;
    while (i < sample.code.size()) {
        bool at_boundary = i == 0 || !is_ident_char(sample.code[i - 1]);
        if (at_boundary && sample.code.compare(i, name.size(), name) == 0) {
            std::size_t after = i + name.size();
            if (after >= sample.code.size() || !is_ident_char(sample.code[after])) {
                masked += "METHODNAMEMASK";
                i = after;
                continue;
            }
        }
        masked += sample.code[i];
        ++i;
    }
    Sample out = sample;
    out.task = Task::MethodNaming;
    out.code = std::move(masked);
    out.summary = name;
    out.derive_subtokens();
    return out;
}

Corpus to_method_naming(const Corpus& corpus) {
    std::vector<Sample> samples;
    samples.reserve(corpus.samples.size());
    for (const Sample& s : corpus.samples) samples.push_back(mask_method_name(s));
    return Corpus::from_samples(std::move(samples), corpus.tau);
}

CorpusStats compute_stats(const Corpus& corpus) {
    CorpusStats stats;
    if (!corpus.samples.empty()) stats.task = corpus.samples.front().task;
    for (const Sample& s : corpus.samples)
        if (s.task != stats.task)
            throw std::runtime_error("compute_stats requires a single-task corpus");
    if (stats.task == Task::MethodNaming) stats.summary_thresholds = {2, 3, 6};

    stats.num_samples = corpus.samples.size();
    if (stats.num_samples == 0) return stats; // averages 0, fractions 1 by definition

    double code_total = 0, summary_total = 0;
    std::array<std::size_t, 3> code_within{}, summary_within{};
    for (const Sample& s : corpus.samples) {
        code_total += static_cast<double>(s.code_subtokens.size());
        summary_total += static_cast<double>(s.summary_subtokens.size());
        for (int i = 0; i < 3; ++i) {
            if (s.code_subtokens.size() <= stats.code_thresholds[i]) ++code_within[i];
            if (s.summary_subtokens.size() <= stats.summary_thresholds[i])
                ++summary_within[i];
        }
    }
    double n = static_cast<double>(stats.num_samples);
    stats.avg_code_subtokens = code_total / n;
    stats.avg_summary_subtokens = summary_total / n;
    for (int i = 0; i < 3; ++i) {
        stats.code_fraction_within[i] = static_cast<double>(code_within[i]) / n;
        stats.summary_fraction_within[i] = static_cast<double>(summary_within[i]) / n;
    }
    return stats;
}

} // namespace cseval
