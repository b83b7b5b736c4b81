#include "cseval/stats.hpp"

#include <numeric>
#include <stdexcept>

#include "cseval/rng.hpp"
#include "json.hpp"

namespace cseval {

using nlohmann::json;

void BootstrapConfig::validate() const {
    if (resamples < 1000) throw std::runtime_error("bootstrap resamples must be >= 1000");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::runtime_error("bootstrap confidence must be in (0,1)");
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// One replicate: resampled mean difference between the two systems, each
// with its own index draw. Seeded per replicate so the resample count can
// be summed in any order.
bool replicate_exceeds(const std::vector<double>& better,
                       const std::vector<double>& worse, double threshold,
                       std::uint64_t seed) {
    SplitMix64 rng(seed);
    const std::size_t n = better.size();
    double sum_better = 0, sum_worse = 0;
    for (std::size_t i = 0; i < n; ++i)
        sum_better += better[static_cast<std::size_t>(rng.next_below(n))];
    for (std::size_t i = 0; i < n; ++i)
        sum_worse += worse[static_cast<std::size_t>(rng.next_below(n))];
    double delta = (sum_better - sum_worse) / static_cast<double>(n);
    return delta > threshold;
}

} // namespace

double paired_bootstrap(const std::vector<double>& scores_a,
                        const std::vector<double>& scores_b, const BootstrapConfig& cfg,
                        RunMode mode) {
    cfg.validate();
    if (scores_a.size() != scores_b.size())
        throw std::runtime_error("score vectors differ in length (" +
                                 std::to_string(scores_a.size()) + " vs " +
                                 std::to_string(scores_b.size()) + ")");
    if (scores_a.size() < 2)
        throw std::runtime_error("bootstrap needs at least 2 aligned scores");

    // Report for the better-scoring system.
    const bool a_better = mean_of(scores_a) >= mean_of(scores_b);
    const std::vector<double>& better = a_better ? scores_a : scores_b;
    const std::vector<double>& worse = a_better ? scores_b : scores_a;
    const double delta = mean_of(better) - mean_of(worse);
    const double threshold = 2.0 * delta;

    long exceed = 0;
    const long r = cfg.resamples;
    if (mode == RunMode::Parallel) {
#pragma omp parallel for reduction(+ : exceed) schedule(static)
        for (long i = 0; i < r; ++i) {
            std::uint64_t seed =
                derive_seed(cfg.seed, "bootstrap/" + std::to_string(i));
            if (replicate_exceeds(better, worse, threshold, seed)) ++exceed;
        }
    } else {
        for (long i = 0; i < r; ++i) {
            std::uint64_t seed =
                derive_seed(cfg.seed, "bootstrap/" + std::to_string(i));
            if (replicate_exceeds(better, worse, threshold, seed)) ++exceed;
        }
    }
    return static_cast<double>(exceed) / static_cast<double>(r);
}

SignificanceResult significance_groups(const std::vector<const MetricReport*>& reports,
                                       const std::string& metric,
                                       const BootstrapConfig& cfg) {
    cfg.validate();
    if (reports.empty()) throw std::runtime_error("significance_groups: no reports");
    SignificanceResult result;
    result.metric = metric;
    result.confidence = cfg.confidence;

    const MetricReport& first = *reports.front();
    result.set_label = first.set_label;
    for (const MetricReport* r : reports) {
        if (r->set_label != first.set_label || r->sample_count != first.sample_count)
            throw std::runtime_error(
                "significance_groups: reports cover different evaluation sets ('" +
                r->set_label + "' vs '" + first.set_label + "')");
        if (!r->per_sample.count(metric))
            throw std::runtime_error("report for '" + r->model_id +
                                     "' has no metric '" + metric + "'");
        result.models.push_back(r->model_id);
    }

    const double alpha = 1.0 - cfg.confidence;
    std::vector<std::size_t> component(reports.size());
    std::iota(component.begin(), component.end(), 0);
    auto root = [&](std::size_t i) {
        while (component[i] != i) i = component[i] = component[component[i]];
        return i;
    };

    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (std::size_t j = i + 1; j < reports.size(); ++j) {
            BootstrapConfig pair_cfg = cfg;
            pair_cfg.seed = derive_seed(
                cfg.seed, "pair/" + result.models[i] + "/" + result.models[j]);
            double p = paired_bootstrap(reports[i]->per_sample.at(metric),
                                        reports[j]->per_sample.at(metric), pair_cfg);
            result.p_values[{result.models[i], result.models[j]}] = p;
            if (p >= alpha) component[root(i)] = root(j); // not distinguishable
        }
    }

    std::map<std::size_t, std::vector<std::string>> by_root;
    for (std::size_t i = 0; i < reports.size(); ++i)
        by_root[root(i)].push_back(result.models[i]);
    for (auto& [r, members] : by_root) result.groups.push_back(std::move(members));
    return result;
}

std::map<std::string, std::string> SignificanceResult::letters() const {
    std::map<std::string, std::string> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::string letter;
        std::size_t k = g;
        do {
            letter.insert(letter.begin(), static_cast<char>('a' + k % 26));
            k = k / 26;
        } while (k-- > 0);
        for (const std::string& model : groups[g]) out[model] = letter;
    }
    return out;
}

std::string SignificanceResult::to_json() const {
    json j;
    j["metric"] = metric;
    j["set_label"] = set_label;
    j["confidence"] = confidence;
    j["test"] = "one-sided paired bootstrap";
    j["models"] = models;
    json pv = json::array();
    for (const auto& [key, p] : p_values)
        pv.push_back({{"model_a", key.first}, {"model_b", key.second}, {"p", p}});
    j["p_values"] = pv;
    j["groups"] = groups;
    json letter_map = json::object();
    for (const auto& [model, letter] : letters()) letter_map[model] = letter;
    j["letters"] = letter_map;
    return j.dump(2) + "\n";
}

} // namespace cseval
