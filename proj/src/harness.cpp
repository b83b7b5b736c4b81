#include "cseval/harness.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cseval/ingest.hpp"
#include "cseval/rng.hpp"
#include "cseval/subtoken.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace cseval {

using nlohmann::json;

void SynthConfig::validate() const {
    if (n_projects < 1 || samples_per_project_per_segment < 1)
        throw std::runtime_error("synthetic corpus needs at least 1 project and 1 sample");
    if (samples_per_project_per_segment > 336)
        throw std::runtime_error(
            "at most 336 samples per project per segment keep timestamps monotone");
    if (vocab_drift < 0 || vocab_drift > 1 || clone_rate < 0 || clone_rate > 1)
        throw std::runtime_error("synthetic probabilities must be in [0,1]");
}

SplitConfig default_split_config(std::uint64_t seed) {
    SplitConfig cfg;
    cfg.tau_minus_2 = Date{2019, 1, 1};
    cfg.tau_minus_1 = Date{2020, 1, 1};
    cfg.tau = Date{2021, 1, 1};
    cfg.seed = seed;
    return cfg;
}

namespace {

constexpr std::size_t kPoolSize = 8;
constexpr std::size_t kTemplates = 6;

std::string letters_token(std::uint64_t value) {
    std::string out;
    do {
        out.insert(out.begin(), static_cast<char>('a' + value % 26));
        value /= 26;
    } while (value > 0);
    return out;
}

std::string fresh_word(SplitMix64& rng) {
    static const char* syllables[] = {"ba", "ce", "di", "fo", "gu", "ka", "le", "mi",
                                      "no", "pu", "ra", "se", "ta", "vo", "zu", "he"};
    std::string word;
    for (int i = 0; i < 3; ++i) word += syllables[rng.next_below(16)];
    return word;
}

std::string capitalize(std::string word) {
    if (!word.empty())
        word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    return word;
}

// Strictly increasing within a year for k < 336; a sample always postdates
// every earlier sample of the same segment, so clones are later than their
// originals by construction.
Date date_in_year(int year, std::size_t k) {
    return Date{year, static_cast<int>(k / 28) + 1, static_cast<int>(k % 28) + 1};
}

std::string sanitize(std::string label) {
    for (char& c : label)
        if (c == '/') c = '_';
    return label;
}

} // namespace

Corpus generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    const SplitConfig split = default_split_config();
    const int segment_years[3] = {split.tau_minus_2.year - 1, split.tau_minus_1.year - 1,
                                  split.tau.year - 1};

    std::vector<Sample> samples;
    std::uint64_t unique_counter = 0;

    for (std::size_t p = 0; p < cfg.n_projects; ++p) {
        std::string project = "proj" + letters_token(p);
        SplitMix64 rng(derive_seed(cfg.seed, "synth/" + project));

        std::vector<std::string> pool;
        for (std::size_t k = 0; k < kPoolSize; ++k) pool.push_back(fresh_word(rng));

        std::vector<std::size_t> earlier; // indices of this project's prior samples
        std::size_t next_index = 0;

        for (int segment = 0; segment < 3; ++segment) {
            if (segment > 0) {
                for (std::string& word : pool)
                    if (rng.next_unit() < cfg.vocab_drift) word = fresh_word(rng);
            }
            for (std::size_t k = 0; k < cfg.samples_per_project_per_segment; ++k) {
                Sample s;
                s.project = project;
                s.task = Task::CommentGeneration;
                char idbuf[16];
                std::snprintf(idbuf, sizeof(idbuf), "%06zu", next_index++);
                s.id = project + ":" + idbuf;

                s.timestamp = date_in_year(segment_years[segment], k);

                bool clone = !earlier.empty() && rng.next_unit() < cfg.clone_rate;
                if (clone) {
                    const Sample& original = samples[earlier[rng.next_below(earlier.size())]];
                    s.code = original.code;
                    s.summary = original.summary;
                    s.name = original.name;
                } else {
                    std::size_t t = rng.next_below(kTemplates);
                    const std::string& w1 = pool[t];
                    const std::string& w2 = pool[(t + 1) % kPoolSize];
                    const std::string& w3 = pool[(t + 2) % kPoolSize];
                    std::string unique = "q" + letters_token(unique_counter++);
                    s.name = "do" + capitalize(w1) + capitalize(w2);
                    s.code = "int " + s.name + "(int " + unique + ") { return " + w1 +
                             "_impl + " + w1 + "_arg + " + w2 + "_impl + " + w2 +
                             "_arg + " + w3 + "_impl + " + w3 + "_arg; }";
                    s.summary = "returns the " + w1 + " " + w2 + " " + w3 + " value.";
                }
                earlier.push_back(samples.size());
                samples.push_back(std::move(s));
            }
        }
    }

    Corpus corpus = Corpus::from_samples(std::move(samples), split.tau);
    if (cfg.task == Task::MethodNaming) corpus = to_method_naming(corpus);
    return corpus;
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Retrieval: return "retrieval";
        case ModelKind::Frequency: return "frequency";
        case ModelKind::CopyOracle: return "copy-oracle";
    }
    return {};
}

ModelKind model_kind_from_string(std::string_view s) {
    if (s == "retrieval") return ModelKind::Retrieval;
    if (s == "frequency") return ModelKind::Frequency;
    if (s == "copy-oracle") return ModelKind::CopyOracle;
    throw std::runtime_error("unknown model kind '" + std::string(s) + "'");
}

Model Model::train(const ModelSpec& spec, const SampleSet& train, const Corpus& corpus) {
    Model model;
    model.kind_ = spec.kind;
    model.trained_on_ = train.label;
    if (spec.kind == ModelKind::CopyOracle) return model;

    if (train.empty())
        throw std::runtime_error(to_string(spec.kind) +
                                 " model cannot train on the empty set '" + train.label +
                                 "'");
    model.train_ids_ = train.ids;

    if (spec.kind == ModelKind::Retrieval) {
        model.index_.reserve(train.size());
        for (const std::string& id : train.ids) model.index_.push_back({&corpus.at(id)});
    } else {
        std::map<std::vector<std::string>, std::size_t> counts;
        for (const std::string& id : train.ids) ++counts[corpus.at(id).summary_subtokens];
        std::size_t best = 0;
        for (const auto& [summary, count] : counts) {
            // std::map iterates lexicographically, so ties keep the
            // smallest sequence.
            if (count > best) {
                best = count;
                model.constant_summary_ = summary;
            }
        }
    }
    return model;
}

std::vector<std::string> Model::predict(const Sample& sample) const {
    switch (kind_) {
        case ModelKind::CopyOracle: return sample.summary_subtokens;
        case ModelKind::Frequency: return constant_summary_;
        case ModelKind::Retrieval: break;
    }
    double best_sim = -1.0;
    const Sample* best = nullptr;
    for (const IndexEntry& entry : index_) {
        double sim =
            positional_similarity(sample.code_subtokens, entry.sample->code_subtokens);
        if (sim > best_sim) { // index is id-sorted: ties keep the smallest id
            best_sim = sim;
            best = entry.sample;
        }
    }
    return best->summary_subtokens;
}

std::vector<Tokens> predict_set(const Model& model, const SampleSet& set,
                                const Corpus& corpus, RunMode mode) {
    std::vector<Tokens> predictions(set.size());
    const long n = static_cast<long>(set.size());
    if (mode == RunMode::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < n; ++i)
            predictions[static_cast<std::size_t>(i)] =
                model.predict(corpus.at(set.ids[static_cast<std::size_t>(i)]));
    } else {
        for (long i = 0; i < n; ++i)
            predictions[static_cast<std::size_t>(i)] =
                model.predict(corpus.at(set.ids[static_cast<std::size_t>(i)]));
    }
    return predictions;
}

void ExperimentConfig::validate() const {
    split.validate();
    bootstrap.validate();
    if (seeds.empty()) throw std::runtime_error("experiment needs at least one seed");
    if (models.empty()) throw std::runtime_error("experiment needs at least one model");
}

const MetricReport* ExperimentBundle::report(std::size_t run, const std::string& system,
                                             const std::string& set_label) const {
    if (run >= runs.size()) return nullptr;
    for (const MetricReport& r : runs[run].reports)
        if (r.model_id == system && r.set_label == set_label) return &r;
    return nullptr;
}

ExperimentBundle run_experiment(const Corpus& corpus, const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentBundle bundle;
    if (!corpus.samples.empty()) bundle.task = corpus.samples.front().task;
    bundle.metrics = metric_names(bundle.task);

    for (const ModelSpec& spec : cfg.models)
        for (Methodology m : kMethodologies)
            bundle.systems.push_back(to_string(spec.kind) + "[" + to_string(m) + "]");

    for (Methodology m : kMethodologies)
        bundle.set_labels.push_back(to_string(m) + "/tests");
    for (auto [a, b] : kMethodologyPairs)
        bundle.set_labels.push_back(pair_label(a, b) + "/testc");

    for (std::uint64_t seed : cfg.seeds) {
        SeedRun run;
        run.seed = seed;
        SplitConfig split_cfg = cfg.split;
        split_cfg.seed = seed;
        run.artifacts = run_pipeline(corpus, split_cfg);

        // A model trained on methodology m is evaluated on its own TestS
        // and on every TestC pair involving m.
        auto eval_sets_for = [&](Methodology m) {
            std::vector<const SampleSet*> sets;
            sets.push_back(&run.artifacts.tests(m));
            for (auto [a, b] : kMethodologyPairs)
                if (a == m || b == m) sets.push_back(&run.artifacts.testc(a, b));
            return sets;
        };

        for (const ModelSpec& spec : cfg.models) {
            for (Methodology m : kMethodologies) {
                Model model = Model::train(spec, run.artifacts.train(m), corpus);
                std::string system = to_string(spec.kind) + "[" + to_string(m) + "]";
                for (const SampleSet* set : eval_sets_for(m)) {
                    auto predictions = predict_set(model, *set, corpus);
                    run.reports.push_back(evaluate_set(predictions, *set, corpus, system));
                }
            }
        }

        for (const std::string& set_label : bundle.set_labels) {
            std::vector<const MetricReport*> on_set;
            for (const MetricReport& r : run.reports)
                if (r.set_label == set_label) on_set.push_back(&r);
            if (on_set.size() < 2 || on_set.front()->sample_count < 2) continue;
            for (const std::string& metric : bundle.metrics) {
                BootstrapConfig bootstrap_cfg = cfg.bootstrap;
                bootstrap_cfg.seed =
                    derive_seed(cfg.bootstrap.seed, "sig/" + std::to_string(seed) + "/" +
                                                        set_label + "/" + metric);
                run.significance.push_back(
                    significance_groups(on_set, metric, bootstrap_cfg));
            }
        }
        bundle.runs.push_back(std::move(run));
    }

    for (const std::string& system : bundle.systems) {
        for (const std::string& set_label : bundle.set_labels) {
            for (const std::string& metric : bundle.metrics) {
                double sum = 0;
                std::size_t n = 0;
                for (std::size_t r = 0; r < bundle.runs.size(); ++r) {
                    const MetricReport* rep = bundle.report(r, system, set_label);
                    if (rep && rep->aggregates.count(metric)) {
                        sum += rep->aggregates.at(metric);
                        ++n;
                    }
                }
                if (n > 0)
                    bundle.mean_aggregate[system + "|" + set_label + "|" + metric] =
                        sum / static_cast<double>(n);
            }
        }
    }
    return bundle;
}

void ExperimentBundle::write(const fs::path& dir) const {
    fs::create_directories(dir);

    json index;
    index["format"] = "cseval-experiment-bundle";
    index["version"] = 1;
    index["task"] = to_string(task);
    index["systems"] = systems;
    index["set_labels"] = set_labels;
    index["metrics"] = metrics;
    json seeds = json::array();
    for (const SeedRun& run : runs) seeds.push_back(run.seed);
    index["seeds"] = seeds;
    atomic_write(dir / "bundle.json", index.dump(2) + "\n");

    for (const SeedRun& run : runs) {
        fs::path seed_dir = dir / ("seed_" + std::to_string(run.seed));
        fs::create_directories(seed_dir);
        save_manifest(run.artifacts, seed_dir / "manifest.json");
        for (const MetricReport& report : run.reports)
            atomic_write(seed_dir / ("report_" + sanitize(report.model_id) + "_on_" +
                                     sanitize(report.set_label) + ".json"),
                         report.to_json());
        for (const SignificanceResult& sig : run.significance)
            atomic_write(seed_dir / ("significance_" + sanitize(sig.set_label) + "_" +
                                     sig.metric + ".json"),
                         sig.to_json());
    }

    std::set<std::string> model_names;
    for (const std::string& system : systems)
        model_names.insert(system.substr(0, system.find('[')));

    for (const std::string& metric : metrics) {
        std::ostringstream csv;
        csv << "model";
        for (auto [a, b] : kMethodologyPairs)
            for (Methodology m : {a, b})
                csv << ',' << pair_label(a, b) << ':' << to_string(m) << ','
                    << pair_label(a, b) << ':' << to_string(m) << ":group";
        csv << '\n';

        for (const std::string& model : model_names) {
            csv << model;
            for (auto [a, b] : kMethodologyPairs) {
                std::string set_label = pair_label(a, b) + "/testc";
                for (Methodology m : {a, b}) {
                    std::string system = model + "[" + to_string(m) + "]";
                    auto it = mean_aggregate.find(system + "|" + set_label + "|" + metric);
                    csv << ',';
                    if (it != mean_aggregate.end()) csv << it->second;
                    csv << ',';
                    if (!runs.empty()) {
                        for (const SignificanceResult& sig : runs.front().significance) {
                            if (sig.metric != metric || sig.set_label != set_label)
                                continue;
                            auto letters = sig.letters();
                            auto lit = letters.find(system);
                            if (lit != letters.end()) csv << lit->second;
                        }
                    }
                }
            }
            csv << '\n';
        }
        atomic_write(dir / ("summary_" + metric + ".csv"), csv.str());
    }
}

std::size_t emit_plot_data(const fs::path& bundle_dir, const fs::path& out_dir) {
    std::ifstream index_in(bundle_dir / "bundle.json");
    if (!index_in)
        throw std::runtime_error("no bundle.json under '" + bundle_dir.string() + "'");
    json index = json::parse(index_in);
    if (index.value("format", "") != "cseval-experiment-bundle")
        throw std::runtime_error("'" + bundle_dir.string() +
                                 "' is not an experiment bundle");

    auto systems = index.at("systems").get<std::vector<std::string>>();
    auto metrics = index.at("metrics").get<std::vector<std::string>>();
    auto seeds = index.at("seeds").get<std::vector<std::uint64_t>>();
    auto set_labels = index.at("set_labels").get<std::vector<std::string>>();

    fs::create_directories(out_dir);
    std::size_t written = 0;
    for (const std::string& metric : metrics) {
        for (const std::string& set_label : set_labels) {
            if (set_label.find("/testc") == std::string::npos) continue;
            std::ostringstream csv;
            csv << "model,mean";
            for (std::uint64_t seed : seeds) csv << ",seed_" << seed;
            csv << '\n';
            bool any_row = false;
            for (const std::string& system : systems) {
                std::vector<double> values;
                for (std::uint64_t seed : seeds) {
                    fs::path file = bundle_dir / ("seed_" + std::to_string(seed)) /
                                    ("report_" + sanitize(system) + "_on_" +
                                     sanitize(set_label) + ".json");
                    std::ifstream in(file);
                    if (!in) continue;
                    std::ostringstream buf;
                    buf << in.rdbuf();
                    MetricReport report = MetricReport::from_json(buf.str());
                    if (report.aggregates.count(metric))
                        values.push_back(report.aggregates.at(metric));
                }
                if (values.empty()) continue;
                double mean = 0;
                for (double v : values) mean += v;
                mean /= static_cast<double>(values.size());
                csv << system << ',' << mean;
                for (double v : values) csv << ',' << v;
                csv << '\n';
                any_row = true;
            }
            if (!any_row) continue;
            atomic_write(out_dir / ("plot_" + metric + "_" + sanitize(set_label) + ".csv"),
                         csv.str());
            ++written;
        }
    }
    return written;
}

} // namespace cseval
