// cseval - corpus splitting and evaluation for code summarization datasets.
//
// Subcommands: mine, filter, stats, split, clean-check, eval, compare, synth.
// Every output is written atomically (temp file + rename) and is
// byte-reproducible for identical inputs and flags.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cseval/harness.hpp"
#include "cseval/ingest.hpp"
#include "cseval/metrics.hpp"
#include "cseval/miner.hpp"
#include "cseval/rng.hpp"
#include "cseval/splitter.hpp"
#include "cseval/stats.hpp"
#include "cseval/subtoken.hpp"
#include "cseval/version.hpp"

namespace {

using namespace cseval;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_or_print(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-")
        std::cout << content;
    else
        atomic_write(out_path, content);
}

struct SplitFlags {
    std::string tau2, tau1, tau;
    double rx = 0.7, ry = 0.1, rz = 0.2;
    std::uint64_t seed = 7;
    std::string dedup = "exact-pair";
    double sim_threshold = 0.9;

    SplitConfig to_config() const {
        SplitConfig cfg;
        cfg.tau_minus_2 = Date::parse(tau2);
        cfg.tau_minus_1 = Date::parse(tau1);
        cfg.tau = Date::parse(tau);
        cfg.r_x = rx;
        cfg.r_y = ry;
        cfg.r_z = rz;
        cfg.seed = seed;
        cfg.dedup.mode = dedup_mode_from_string(dedup);
        cfg.dedup.threshold = sim_threshold;
        cfg.validate();
        return cfg;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"corpus splitting and evaluation toolkit for code summarization datasets"};
    app.set_version_flag("--version", std::string("cseval ") + kToolVersion);
    app.require_subcommand(1);

    // --- mine ---------------------------------------------------------
    auto* mine_cmd = app.add_subcommand(
        "mine", "extract timestamped samples from local git repositories");
    std::vector<std::string> repos, cutoff_strings;
    std::string mine_out;
    mine_cmd->add_option("--repo", repos, "local repository directory (repeatable)")
        ->required();
    mine_cmd
        ->add_option("--cutoffs", cutoff_strings,
                     "snapshot cutoff dates, e.g. 2019-01-01 2020-01-01 2021-01-01")
        ->required();
    mine_cmd->add_option("--out", mine_out, "output corpus (JSONL)")->required();
    mine_cmd->callback([&] {
        MinerConfig cfg;
        cfg.repo_paths = repos;
        for (const std::string& s : cutoff_strings) cfg.cutoffs.push_back(Date::parse(s));
        Corpus corpus = mine(cfg);
        save_corpus(corpus, mine_out);
        std::cerr << "mined " << corpus.size() << " samples from " << repos.size()
                  << " repositories\n";
    });

    // --- filter -------------------------------------------------------
    auto* filter_cmd =
        app.add_subcommand("filter", "apply sample filters (and optional name masking)");
    std::string filter_in, filter_out, filter_report, filter_task = "comment";
    std::size_t max_code_chars = 10000;
    filter_cmd->add_option("--in", filter_in, "input corpus")->required();
    filter_cmd->add_option("--out", filter_out, "filtered corpus")->required();
    filter_cmd->add_option("--report", filter_report, "filter report (JSON)");
    filter_cmd->add_option("--max-code-chars", max_code_chars,
                           "discard samples with longer code");
    filter_cmd->add_option("--task", filter_task,
                           "'comment' keeps summaries, 'naming' masks method names "
                           "after filtering");
    filter_cmd->callback([&] {
        if (filter_task != "comment" && filter_task != "naming")
            throw std::runtime_error("--task must be 'comment' or 'naming'");
        Corpus corpus = load_corpus(filter_in);
        FilterOptions opts;
        opts.max_code_chars = max_code_chars;
        auto [filtered, report] = filter_corpus(corpus, opts);
        if (filter_task == "naming") filtered = to_method_naming(filtered);
        save_corpus(filtered, filter_out);
        if (!filter_report.empty()) atomic_write(filter_report, report.to_json());
        std::cerr << "retained " << report.retained << " of " << corpus.size()
                  << " samples\n";
    });

    // --- stats --------------------------------------------------------
    auto* stats_cmd = app.add_subcommand("stats", "corpus statistics (JSON)");
    std::string stats_in, stats_out;
    stats_cmd->add_option("--in", stats_in, "input corpus")->required();
    stats_cmd->add_option("--out", stats_out, "output path (default stdout)");
    stats_cmd->callback([&] {
        CorpusStats stats = compute_stats(load_corpus(stats_in));
        write_or_print(stats_out, stats.to_json());
    });

    // --- split --------------------------------------------------------
    auto* split_cmd =
        app.add_subcommand("split", "run the six-step splitting pipeline");
    std::string split_in, split_out;
    SplitFlags flags;
    split_cmd->add_option("--in", split_in, "input corpus")->required();
    split_cmd->add_option("--out", split_out,
                          "output manifest (default: <in>.manifest.json)");
    split_cmd->add_option("--tau2", flags.tau2, "first segment boundary")->required();
    split_cmd->add_option("--tau1", flags.tau1, "second segment boundary")->required();
    split_cmd->add_option("--tau", flags.tau, "collection instant")->required();
    split_cmd->add_option("--rx", flags.rx, "train ratio");
    split_cmd->add_option("--ry", flags.ry, "val ratio");
    split_cmd->add_option("--rz", flags.rz, "test ratio");
    split_cmd->add_option("--seed", flags.seed, "shuffle seed")->envname("CSEVAL_SEED");
    split_cmd->add_option("--dedup", flags.dedup,
                          "duplicate rule: exact-pair|same-code|same-nl|sim90");
    split_cmd->add_option("--sim-threshold", flags.sim_threshold,
                          "similarity threshold for sim90");
    split_cmd->callback([&] {
        if (split_out.empty()) split_out = split_in + ".manifest.json";
        Corpus corpus = load_corpus(split_in);
        SplitArtifacts artifacts = run_pipeline(corpus, flags.to_config());
        save_manifest(artifacts, split_out);
        std::cerr << "wrote manifest with " << artifacts.sets.size() << " sets to "
                  << split_out << "\n";
    });

    // --- clean-check ----------------------------------------------------
    auto* check_cmd = app.add_subcommand(
        "clean-check", "re-verify every invariant of an existing manifest");
    std::string check_corpus, check_manifest;
    check_cmd->add_option("--corpus", check_corpus, "corpus the manifest was built from")
        ->required();
    check_cmd->add_option("--manifest", check_manifest, "split manifest")->required();
    check_cmd->callback([&] {
        Corpus corpus = load_corpus(check_corpus);
        SplitArtifacts artifacts = load_manifest(check_manifest);
        std::vector<std::string> violations = verify_artifacts(artifacts, corpus);
        if (!violations.empty()) {
            std::string msg = violations.front();
            if (violations.size() > 1)
                msg += " (+" + std::to_string(violations.size() - 1) + " more)";
            throw std::runtime_error(msg);
        }
        std::cerr << "manifest ok\n";
    });

    // --- eval -----------------------------------------------------------
    auto* eval_cmd =
        app.add_subcommand("eval", "score predictions against one manifest set");
    std::string eval_corpus, eval_manifest, eval_set, eval_preds, eval_model = "model";
    std::string eval_out, eval_format = "json";
    eval_cmd->add_option("--corpus", eval_corpus, "corpus")->required();
    eval_cmd->add_option("--manifest", eval_manifest, "split manifest")->required();
    eval_cmd->add_option("--set", eval_set, "set label, e.g. MP/tests or MP-T/testc")
        ->required();
    eval_cmd
        ->add_option("--preds", eval_preds,
                     "predictions, one per line, aligned with the set's id order")
        ->required();
    eval_cmd->add_option("--model-id", eval_model, "model name for the report");
    eval_cmd->add_option("--out", eval_out, "report path (default stdout)");
    eval_cmd->add_option("--format", eval_format, "json|csv");
    eval_cmd->callback([&] {
        Corpus corpus = load_corpus(eval_corpus);
        SplitArtifacts artifacts = load_manifest(eval_manifest);
        if (!artifacts.sets.count(eval_set))
            throw std::runtime_error("manifest has no set '" + eval_set + "'");
        const SampleSet& set = artifacts.sets.at(eval_set);

        std::vector<Tokens> predictions;
        std::istringstream lines(slurp(eval_preds));
        std::string line;
        while (std::getline(lines, line)) predictions.push_back(subtokenize(line));

        MetricReport report = evaluate_set(predictions, set, corpus, eval_model);
        write_or_print(eval_out, eval_format == "csv" ? report.to_csv() : report.to_json());
    });

    // --- compare --------------------------------------------------------
    auto* compare_cmd = app.add_subcommand(
        "compare", "significance table across model reports, or plot-data emission");
    std::vector<std::string> compare_reports;
    std::string compare_metric, compare_out, compare_format = "csv";
    std::string compare_bundle, compare_plot_out;
    BootstrapConfig bootstrap_cfg;
    compare_cmd->add_option("--report", compare_reports,
                            "metric report JSON (repeat per model)");
    compare_cmd->add_option("--metric", compare_metric,
                            "metric name (default: all metrics in the first report)");
    compare_cmd->add_option("--resamples", bootstrap_cfg.resamples, "bootstrap resamples");
    compare_cmd->add_option("--confidence", bootstrap_cfg.confidence,
                            "significance confidence level");
    compare_cmd->add_option("--seed", bootstrap_cfg.seed, "bootstrap seed")
        ->envname("CSEVAL_SEED");
    compare_cmd->add_option("--out", compare_out, "output path (default stdout)");
    compare_cmd->add_option("--format", compare_format, "csv|json");
    compare_cmd->add_option("--bundle", compare_bundle,
                            "experiment bundle directory (plot-data mode)");
    compare_cmd->add_option("--plot-out", compare_plot_out,
                            "directory for per-(metric, pair) plot CSVs");
    compare_cmd->callback([&] {
        if (!compare_bundle.empty() || !compare_plot_out.empty()) {
            if (compare_bundle.empty() || compare_plot_out.empty())
                throw std::runtime_error("plot-data mode needs both --bundle and --plot-out");
            std::size_t n = emit_plot_data(compare_bundle, compare_plot_out);
            std::cerr << "wrote " << n << " plot files\n";
            return;
        }
        if (compare_reports.size() < 2)
            throw std::runtime_error("compare needs at least two --report files");
        std::vector<MetricReport> reports;
        for (const std::string& path : compare_reports)
            reports.push_back(MetricReport::from_json(slurp(path)));
        std::vector<const MetricReport*> pointers;
        for (const MetricReport& r : reports) pointers.push_back(&r);

        std::vector<std::string> metrics;
        if (compare_metric.empty())
            for (const auto& [name, values] : reports.front().per_sample)
                metrics.push_back(name);
        else
            metrics.push_back(compare_metric);

        std::ostringstream csv;
        std::string all_json = "[\n";
        csv << "metric,model,score,group\n";
        for (std::size_t k = 0; k < metrics.size(); ++k) {
            BootstrapConfig cfg = bootstrap_cfg;
            cfg.seed = derive_seed(bootstrap_cfg.seed, "compare/" + metrics[k]);
            SignificanceResult sig = significance_groups(pointers, metrics[k], cfg);
            auto letters = sig.letters();
            for (const MetricReport& r : reports)
                csv << metrics[k] << ',' << r.model_id << ','
                    << r.aggregates.at(metrics[k]) << ',' << letters.at(r.model_id)
                    << '\n';
            all_json += sig.to_json();
            if (k + 1 < metrics.size()) all_json += ",\n";
        }
        all_json += "]\n";
        write_or_print(compare_out, compare_format == "json" ? all_json : csv.str());
    });

    // --- synth ----------------------------------------------------------
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a seeded synthetic corpus");
    SynthConfig synth_cfg;
    std::string synth_out, synth_task = "comment";
    synth_cmd->add_option("--out", synth_out, "output corpus (JSONL)")->required();
    synth_cmd->add_option("--projects", synth_cfg.n_projects, "number of projects");
    synth_cmd->add_option("--per-segment", synth_cfg.samples_per_project_per_segment,
                          "samples per project per time segment");
    synth_cmd->add_option("--drift", synth_cfg.vocab_drift,
                          "per-segment vocabulary replacement probability");
    synth_cmd->add_option("--clone-rate", synth_cfg.clone_rate,
                          "probability a sample clones an earlier one");
    synth_cmd->add_option("--seed", synth_cfg.seed, "generator seed")
        ->envname("CSEVAL_SEED");
    synth_cmd->add_option("--task", synth_task, "comment|naming");
    synth_cmd->callback([&] {
        synth_cfg.task =
            synth_task == "naming" ? Task::MethodNaming : Task::CommentGeneration;
        Corpus corpus = generate_synthetic(synth_cfg);
        save_corpus(corpus, synth_out);
        std::cerr << "generated " << corpus.size() << " samples\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
