#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cseval/corpus.hpp"

namespace cseval {

struct FilterOptions {
    std::size_t max_code_chars = 10000;
    // Inline doc tags whose whole occurrence is dropped; other inline tags
    // keep their payload text ("{@link Foo}" -> "Foo").
    std::vector<std::string> drop_tags = {"inheritDoc", "docRoot"};
};

// Removal counters, one per reason, applied in this order. A sample
// removed for multiple reasons is counted once under the first match.
struct FilterReport {
    std::size_t non_english_code = 0;
    std::size_t non_english_comment = 0;
    std::size_t code_too_long = 0;
    std::size_t empty_body = 0;
    std::size_t empty_comment = 0;
    std::size_t retained = 0;

    std::size_t removed() const {
        return non_english_code + non_english_comment + code_too_long + empty_body +
               empty_comment;
    }
    std::string to_json() const;
};

struct CorpusStats {
    Task task = Task::CommentGeneration;
    std::size_t num_samples = 0;
    double avg_code_subtokens = 0;
    std::array<std::size_t, 3> code_thresholds{100, 150, 200};
    std::array<double, 3> code_fraction_within{1, 1, 1};
    double avg_summary_subtokens = 0;
    std::array<std::size_t, 3> summary_thresholds{20, 30, 50};
    std::array<double, 3> summary_fraction_within{1, 1, 1};

    std::string to_json() const;
};

// Strips doc markup from a comment sentence: inline {@...} tags, block
// tags (@param ... onward), HTML tags, comment margins.
std::string strip_doc_tags(const std::string& text, const FilterOptions& opts = {});

bool is_english_text(const std::string& text);

std::pair<Corpus, FilterReport> filter_corpus(const Corpus& corpus,
                                              const FilterOptions& opts = {});

// Replaces standalone occurrences of the method name in code with
// METHODNAMEMASK and makes the name the sample's summary.
Sample mask_method_name(const Sample& sample);

// Masks every sample; used to derive the naming-task corpus.
Corpus to_method_naming(const Corpus& corpus);

CorpusStats compute_stats(const Corpus& corpus);

} // namespace cseval
