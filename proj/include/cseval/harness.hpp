#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cseval/corpus.hpp"
#include "cseval/metrics.hpp"
#include "cseval/parallel.hpp"
#include "cseval/splitter.hpp"
#include "cseval/stats.hpp"

namespace cseval {

struct SynthConfig {
    std::size_t n_projects = 20;
    std::size_t samples_per_project_per_segment = 20;
    double vocab_drift = 0.3; // per-segment chance a vocabulary slot is replaced
    double clone_rate = 0.0;  // chance a sample duplicates an earlier same-project one
    std::uint64_t seed = 1;
    Task task = Task::CommentGeneration;

    void validate() const;
};

// The synthetic generator emits three segments around these instants.
SplitConfig default_split_config(std::uint64_t seed = 7);

/// Seeded corpus with per-project vocabularies that drift across segments
/// and optional exact clones of earlier samples. Non-clone samples are
/// pairwise distinct in (code, summary).
Corpus generate_synthetic(const SynthConfig& cfg);

enum class ModelKind { Retrieval, Frequency, CopyOracle };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view s);

struct ModelSpec {
    ModelKind kind = ModelKind::Retrieval;
};

/// Toy baselines standing in for trained models. Retrieval answers with the
/// summary of the train sample whose code is positionally most similar
/// (ties to the smallest id); Frequency always answers the most frequent
/// train summary; CopyOracle echoes the gold summary and exists only for
/// test fixtures.
class Model {
public:
    static Model train(const ModelSpec& spec, const SampleSet& train,
                       const Corpus& corpus);

    std::vector<std::string> predict(const Sample& sample) const;

    ModelKind kind() const { return kind_; }
    const std::string& trained_on() const { return trained_on_; }
    // Instrumentation: exactly the ids the model saw during training.
    const std::vector<std::string>& train_ids() const { return train_ids_; }

private:
    struct IndexEntry {
        const Sample* sample;
    };
    ModelKind kind_ = ModelKind::CopyOracle;
    std::string trained_on_;
    std::vector<std::string> train_ids_;
    std::vector<IndexEntry> index_;             // retrieval, sorted by id
    std::vector<std::string> constant_summary_; // frequency
};

std::vector<Tokens> predict_set(const Model& model, const SampleSet& set,
                                const Corpus& corpus,
                                RunMode mode = RunMode::Parallel);

struct ExperimentConfig {
    SplitConfig split;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    BootstrapConfig bootstrap;
    std::vector<ModelSpec> models = {{ModelKind::Retrieval}, {ModelKind::Frequency}};

    void validate() const;
};

struct SeedRun {
    std::uint64_t seed = 0;
    SplitArtifacts artifacts;
    std::vector<MetricReport> reports;
    std::vector<SignificanceResult> significance;
};

struct ExperimentBundle {
    Task task = Task::CommentGeneration;
    std::vector<std::string> systems; // "retrieval[MP]", ...
    std::vector<std::string> set_labels;
    std::vector<std::string> metrics;
    std::vector<SeedRun> runs;

    // Mean over seeds of the per-seed aggregate; zero seeds -> absent.
    std::map<std::string, double> mean_aggregate; // key: system|set|metric
    const MetricReport* report(std::size_t run, const std::string& system,
                               const std::string& set_label) const;

    void write(const std::filesystem::path& dir) const;
};

/// Splits per seed, trains every model on every methodology's Train set,
/// evaluates on each TestS and the TestC pairs involving the train
/// methodology, and attaches bootstrap significance groups.
ExperimentBundle run_experiment(const Corpus& corpus, const ExperimentConfig& cfg);

/// One CSV per (metric, TestC pair) with model, mean, and per-seed values.
/// Returns the number of files written.
std::size_t emit_plot_data(const std::filesystem::path& bundle_dir,
                           const std::filesystem::path& out_dir);

} // namespace cseval
