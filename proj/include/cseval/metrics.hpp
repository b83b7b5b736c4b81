#pragma once

#include <map>
#include <string>
#include <vector>

#include "cseval/corpus.hpp"
#include "cseval/parallel.hpp"

namespace cseval {

using Tokens = std::vector<std::string>;

struct Prf {
    double precision = 0;
    double recall = 0;
    double f = 0;
};

/// Sentence BLEU-4: clipped n-gram precisions up to 4, add-one smoothing on
/// orders >= 2, precision 1 for orders the prediction cannot form, brevity
/// penalty exp(1 - |ref|/|pred|) when the prediction is shorter.
double bleu4(const Tokens& pred, const Tokens& ref);

/// Exact-match METEOR: maximum one-to-one unigram alignment with the fewest
/// chunks, F = PR / (0.9 P + 0.1 R), penalty 0.5 * (chunks/matches)^3.
double meteor(const Tokens& pred, const Tokens& ref);

Prf rouge_l(const Tokens& pred, const Tokens& ref);

double exact_match(const Tokens& pred, const Tokens& ref);

/// Multiset-overlap precision/recall/F1 over subtokens.
Prf set_match_prf(const Tokens& pred, const Tokens& gold);

/// Per-sample scores and their plain means over one evaluation set.
struct MetricReport {
    std::string model_id;
    std::string set_label;
    std::size_t sample_count = 0;
    std::map<std::string, std::vector<double>> per_sample;
    std::map<std::string, double> aggregates;

    std::string to_json() const;
    static MetricReport from_json(const std::string& text);
    std::string to_csv() const;
};

// Metric suite per task: comment generation reports bleu4/meteor/rouge_l_*/
// exact_match, method naming reports set_match_*/exact_match.
std::vector<std::string> metric_names(Task task);

std::map<std::string, double> score_pair(Task task, const Tokens& pred,
                                         const Tokens& ref);

MetricReport evaluate_set(const std::vector<Tokens>& predictions, const SampleSet& set,
                          const Corpus& corpus, const std::string& model_id,
                          RunMode mode = RunMode::Parallel);

} // namespace cseval
