#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <map>
#include <set>

#include "cseval/harness.hpp"
#include "cseval/subtoken.hpp"

using namespace cseval;
namespace fs = std::filesystem;

namespace {

SynthConfig small_synth(std::uint64_t seed, double clone_rate = 0.0) {
    SynthConfig cfg;
    cfg.n_projects = 6;
    cfg.samples_per_project_per_segment = 8;
    cfg.vocab_drift = 0.3;
    cfg.clone_rate = clone_rate;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("synthetic corpora are deterministic per seed") {
    Corpus a = generate_synthetic(small_synth(9));
    Corpus b = generate_synthetic(small_synth(9));
    CHECK(a == b);
    Corpus c = generate_synthetic(small_synth(10));
    CHECK_FALSE(a == c);
}

TEST_CASE("clone_rate 0 gives pairwise distinct samples") {
    Corpus corpus = generate_synthetic(small_synth(3));
    std::set<std::pair<std::string, std::string>> seen;
    for (const Sample& s : corpus.samples)
        CHECK(seen.insert({s.code, s.summary}).second);
}

TEST_CASE("clone_rate 1 duplicates every non-first sample per project") {
    Corpus corpus = generate_synthetic(small_synth(4, 1.0));
    std::map<std::string, std::vector<const Sample*>> by_project;
    for (const Sample& s : corpus.samples) by_project[s.project].push_back(&s);
    for (const auto& [project, samples] : by_project) {
        for (std::size_t i = 1; i < samples.size(); ++i) {
            bool duplicates_earlier = false;
            for (std::size_t j = 0; j < i; ++j)
                if (samples[j]->code == samples[i]->code &&
                    samples[j]->summary == samples[i]->summary)
                    duplicates_earlier = true;
            CHECK(duplicates_earlier);
        }
    }
}

TEST_CASE("clones carry later timestamps than their originals") {
    Corpus corpus = generate_synthetic(small_synth(5, 0.5));
    std::map<std::string, const Sample*> first_of_content;
    for (const Sample& s : corpus.samples) {
        std::string key = s.project + '\x1e' + s.code + '\x1e' + s.summary;
        auto it = first_of_content.find(key);
        if (it == first_of_content.end()) {
            first_of_content[key] = &s;
        } else {
            CHECK(it->second->timestamp < s.timestamp);
        }
    }
}

TEST_CASE("synthetic timestamps respect the default segment bounds") {
    Corpus corpus = generate_synthetic(small_synth(6, 0.4));
    SplitConfig split = default_split_config();
    for (const Sample& s : corpus.samples) CHECK(s.timestamp < split.tau);
}

TEST_CASE("frequency model memorizes the most frequent summary") {
    std::vector<Sample> samples;
    auto add = [&](const std::string& id, const std::string& summary) {
        Sample s;
        s.id = id;
        s.project = "p";
        s.timestamp = Date::parse("2019-01-05");
        s.code = "int " + id + "() { return 0; }";
        s.summary = summary;
        samples.push_back(s);
    };
    add("a", "x words");
    add("b", "x words");
    add("c", "y words");
    Corpus corpus = Corpus::from_samples(samples);
    SampleSet train(corpus.sorted_ids(), "MP/train");
    Model model = Model::train({ModelKind::Frequency}, train, corpus);
    CHECK(model.predict(corpus.at("c")) == subtokenize("x words"));

    SUBCASE("ties break to the lexicographically smallest sequence") {
        add("d", "y words");
        Corpus tie_corpus = Corpus::from_samples(samples);
        SampleSet tie_train(tie_corpus.sorted_ids(), "MP/train");
        Model tie_model = Model::train({ModelKind::Frequency}, tie_train, tie_corpus);
        CHECK(tie_model.predict(tie_corpus.at("a")) == subtokenize("x words"));
    }
}

TEST_CASE("retrieval answers with the closest train sample") {
    std::vector<Sample> samples;
    auto add = [&](const std::string& id, const std::string& code,
                   const std::string& summary) {
        Sample s;
        s.id = id;
        s.project = "p";
        s.timestamp = Date::parse("2019-01-05");
        s.code = code;
        s.summary = summary;
        samples.push_back(s);
    };
    add("t1", "alpha beta gamma", "first summary");
    add("t2", "alpha beta delta", "second summary");
    add("q_exact", "alpha beta gamma", "unused");
    add("q_near", "alpha beta epsilon", "unused");
    Corpus corpus = Corpus::from_samples(samples);
    SampleSet train({"t1", "t2"}, "MP/train");
    Model model = Model::train({ModelKind::Retrieval}, train, corpus);

    CHECK(model.predict(corpus.at("q_exact")) == subtokenize("first summary"));
    // Tie between t1 and t2 (2/3 positions each): smaller id wins.
    CHECK(model.predict(corpus.at("q_near")) == subtokenize("first summary"));

    SUBCASE("singleton train always answers its summary") {
        SampleSet one({"t2"}, "MP/train");
        Model single = Model::train({ModelKind::Retrieval}, one, corpus);
        CHECK(single.predict(corpus.at("q_exact")) == subtokenize("second summary"));
        CHECK(single.predict(corpus.at("q_near")) == subtokenize("second summary"));
    }
}

TEST_CASE("copy oracle echoes gold and trains on nothing") {
    Corpus corpus = generate_synthetic(small_synth(7));
    SampleSet empty({}, "T/train");
    Model oracle = Model::train({ModelKind::CopyOracle}, empty, corpus);
    for (const Sample& s : corpus.samples)
        CHECK(oracle.predict(s) == s.summary_subtokens);
    CHECK(oracle.train_ids().empty());
}

TEST_CASE("retrieval and frequency refuse empty train sets") {
    Corpus corpus = generate_synthetic(small_synth(8));
    SampleSet empty({}, "T/train");
    CHECK_THROWS(Model::train({ModelKind::Retrieval}, empty, corpus));
    CHECK_THROWS(Model::train({ModelKind::Frequency}, empty, corpus));
}

TEST_CASE("predict_set kernels agree") {
    Corpus corpus = generate_synthetic(small_synth(11));
    SplitArtifacts artifacts = run_pipeline(corpus, default_split_config(2));
    Model model =
        Model::train({ModelKind::Retrieval}, artifacts.train(Methodology::MixedProject),
                     corpus);
    const SampleSet& tests = artifacts.tests(Methodology::MixedProject);
    CHECK(predict_set(model, tests, corpus, RunMode::Serial) ==
          predict_set(model, tests, corpus, RunMode::Parallel));
}

TEST_CASE("copy oracle scores exact-match 1.0 on every evaluation set") {
    Corpus corpus = generate_synthetic(small_synth(12, 0.2));
    ExperimentConfig cfg;
    cfg.split = default_split_config();
    cfg.seeds = {7};
    cfg.bootstrap.resamples = 1000;
    cfg.models = {{ModelKind::CopyOracle}};
    ExperimentBundle bundle = run_experiment(corpus, cfg);
    REQUIRE(bundle.runs.size() == 1);
    std::size_t checked = 0;
    for (const MetricReport& report : bundle.runs.front().reports) {
        if (report.sample_count == 0) continue;
        CHECK(report.aggregates.at("exact_match") == doctest::Approx(1.0));
        CHECK(report.aggregates.at("bleu4") == doctest::Approx(1.0));
        CHECK(report.aggregates.at("rouge_l_f") == doctest::Approx(1.0));
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("models only see their own methodology's train manifest") {
    Corpus corpus = generate_synthetic(small_synth(13));
    SplitArtifacts artifacts = run_pipeline(corpus, default_split_config(4));
    for (Methodology m : kMethodologies) {
        Model model = Model::train({ModelKind::Retrieval}, artifacts.train(m), corpus);
        CHECK(model.trained_on() == to_string(m) + "/train");
        const SampleSet& manifest = artifacts.train(m);
        CHECK(model.train_ids().size() == manifest.size());
        for (const std::string& id : model.train_ids()) CHECK(manifest.contains(id));
    }
}

TEST_CASE("exact-pair cleaning never raises retrieval's exact match") {
    for (std::uint64_t seed : {21, 22, 23}) {
        Corpus corpus = generate_synthetic(small_synth(seed, 0.3));
        SplitArtifacts artifacts = run_pipeline(corpus, default_split_config(seed));
        for (Methodology m : kMethodologies) {
            const SampleSet& train = artifacts.train(m);
            if (train.empty()) continue;
            const SampleSet& raw_tests =
                artifacts.raw_sets.at(to_string(m) + "/tests");
            DedupConfig dedup; // ExactPair
            SampleSet cleaned = clean(raw_tests, {&train}, corpus, dedup);
            if (raw_tests.empty() || cleaned.empty()) continue;

            Model model = Model::train({ModelKind::Retrieval}, train, corpus);
            auto em_of = [&](const SampleSet& set) {
                auto preds = predict_set(model, set, corpus);
                MetricReport r = evaluate_set(preds, set, corpus, "retrieval");
                return r.aggregates.at("exact_match");
            };
            CHECK(em_of(cleaned) <= em_of(raw_tests) + 1e-12);
        }
    }
}

TEST_CASE("empty common-test sets are reported empty, without scores") {
    // No samples in the late segment: T/tests and both TestC pairs with T
    // are empty.
    std::vector<Sample> samples;
    for (int p = 0; p < 4; ++p) {
        for (int i = 0; i < 6; ++i) {
            Sample s;
            s.id = "p" + std::to_string(p) + ":" + std::to_string(i);
            s.project = "p" + std::to_string(p);
            s.timestamp = Date::parse(i % 2 ? "2018-06-01" : "2019-06-01");
            s.code = "int f" + s.id + "() { return 0; }";
            s.summary = "summary " + s.id;
            samples.push_back(s);
        }
    }
    Corpus corpus = Corpus::from_samples(samples);
    ExperimentConfig cfg;
    cfg.split = default_split_config();
    cfg.seeds = {1};
    cfg.bootstrap.resamples = 1000;
    cfg.models = {{ModelKind::CopyOracle}};
    ExperimentBundle bundle = run_experiment(corpus, cfg);
    const MetricReport* empty_report =
        bundle.report(0, "copy-oracle[T]", "MP-T/testc");
    REQUIRE(empty_report);
    CHECK(empty_report->sample_count == 0);
    CHECK(empty_report->aggregates.empty());
}

TEST_CASE("experiment bundles write reports, significance and plot data") {
    SynthConfig synth = small_synth(31, 0.1);
    synth.task = Task::MethodNaming; // 4 metrics -> 3 pairs x 4 = 12 plot files
    Corpus corpus = generate_synthetic(synth);
    ExperimentConfig cfg;
    cfg.split = default_split_config();
    cfg.seeds = {5, 6};
    cfg.bootstrap.resamples = 1000;
    cfg.models = {{ModelKind::Retrieval}, {ModelKind::Frequency}};
    ExperimentBundle bundle = run_experiment(corpus, cfg);

    REQUIRE(bundle.runs.size() == 2);
    CHECK_FALSE(bundle.runs.front().significance.empty());

    fs::path dir = fs::temp_directory_path() / "cseval_bundle_test";
    fs::remove_all(dir);
    bundle.write(dir);
    CHECK(fs::exists(dir / "bundle.json"));
    CHECK(fs::exists(dir / "summary_exact_match.csv"));
    CHECK(fs::exists(dir / "seed_5" / "manifest.json"));

    fs::path plots = dir / "plots";
    std::size_t written = emit_plot_data(dir, plots);
    CHECK(written == 12);
    std::size_t found = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(plots)) ++found;
    CHECK(found == 12);

    SUBCASE("an empty bundle emits zero files and succeeds") {
        fs::path empty_dir = fs::temp_directory_path() / "cseval_empty_bundle";
        fs::remove_all(empty_dir);
        fs::create_directories(empty_dir);
        std::ofstream out(empty_dir / "bundle.json");
        out << R"({"format":"cseval-experiment-bundle","version":1,)"
            << R"("task":"comment_generation","systems":[],"set_labels":[],)"
            << R"("metrics":[],"seeds":[]})";
        out.close();
        CHECK(emit_plot_data(empty_dir, empty_dir / "plots") == 0);
        fs::remove_all(empty_dir);
    }

    SUBCASE("plot emission is deterministic") {
        fs::path plots2 = dir / "plots2";
        emit_plot_data(dir, plots2);
        for (const auto& entry : fs::directory_iterator(plots)) {
            fs::path other = plots2 / entry.path().filename();
            REQUIRE(fs::exists(other));
            std::ifstream a(entry.path()), b(other);
            std::string sa((std::istreambuf_iterator<char>(a)),
                           std::istreambuf_iterator<char>());
            std::string sb((std::istreambuf_iterator<char>(b)),
                           std::istreambuf_iterator<char>());
            CHECK(sa == sb);
        }
    }
    fs::remove_all(dir);
}
