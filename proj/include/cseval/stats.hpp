#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cseval/metrics.hpp"
#include "cseval/parallel.hpp"

namespace cseval {

struct BootstrapConfig {
    int resamples = 10000;
    double confidence = 0.95;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One-sided bootstrap p-value for the better-scoring of the two systems.
/// Each replicate draws fresh with-replacement index vectors for both score
/// lists; the p-value is the fraction of replicates whose resampled mean
/// difference exceeds twice the observed one.
double paired_bootstrap(const std::vector<double>& scores_a,
                        const std::vector<double>& scores_b, const BootstrapConfig& cfg,
                        RunMode mode = RunMode::Parallel);

struct SignificanceResult {
    std::string metric;
    std::string set_label;
    double confidence = 0.95;
    std::vector<std::string> models;
    // Keyed by (model_a, model_b) in input order; the p-value is reported
    // for the better-scoring side.
    std::map<std::pair<std::string, std::string>, double> p_values;
    // Connected components of the "not significantly different" relation.
    std::vector<std::vector<std::string>> groups;

    // Group letter per model ("a", "b", ...), for table rendering.
    std::map<std::string, std::string> letters() const;
    std::string to_json() const;
};

SignificanceResult significance_groups(const std::vector<const MetricReport*>& reports,
                                       const std::string& metric,
                                       const BootstrapConfig& cfg);

} // namespace cseval
