// Compares the serial reference kernels against their OpenMP versions on a
// synthetic workload: per-sample metric scoring, duplicate scanning,
// bootstrap resampling, and retrieval prediction.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cseval/harness.hpp"
#include "cseval/metrics.hpp"
#include "cseval/splitter.hpp"
#include "cseval/stats.hpp"

using namespace cseval;

namespace {

template <typename F>
double time_ms(F&& fn) {
    auto begin = std::chrono::steady_clock::now();
    fn();
    auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - begin).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name,
                serial_ms, parallel_ms, parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

    SynthConfig synth;
    synth.n_projects = 24;
    synth.samples_per_project_per_segment = 60;
    synth.clone_rate = 0.1;
    synth.seed = 11;
    Corpus corpus = generate_synthetic(synth);
    std::printf("workload: %zu samples\n\n", corpus.size());

    SplitConfig split_cfg = default_split_config(7);
    SplitArtifacts artifacts = run_pipeline(corpus, split_cfg);
    const SampleSet& train = artifacts.train(Methodology::MixedProject);
    const SampleSet& tests = artifacts.tests(Methodology::MixedProject);

    // Retrieval prediction over a set.
    Model model = Model::train({ModelKind::Retrieval}, train, corpus);
    std::vector<Tokens> preds_serial, preds_parallel;
    double t_serial = time_ms(
        [&] { preds_serial = predict_set(model, tests, corpus, RunMode::Serial); });
    double t_parallel = time_ms(
        [&] { preds_parallel = predict_set(model, tests, corpus, RunMode::Parallel); });
    report("retrieval predict", t_serial, t_parallel);
    if (preds_serial != preds_parallel) {
        std::fprintf(stderr, "mismatch in retrieval kernels\n");
        return 1;
    }

    // Per-sample metric scoring.
    MetricReport rep_serial, rep_parallel;
    t_serial = time_ms(
        [&] { rep_serial = evaluate_set(preds_serial, tests, corpus, "m", RunMode::Serial); });
    t_parallel = time_ms([&] {
        rep_parallel = evaluate_set(preds_parallel, tests, corpus, "m", RunMode::Parallel);
    });
    report("metric scoring", t_serial, t_parallel);
    if (rep_serial.per_sample != rep_parallel.per_sample) {
        std::fprintf(stderr, "mismatch in scoring kernels\n");
        return 1;
    }

    // Near-duplicate scan (the quadratic sim90 mode).
    DedupConfig dedup;
    dedup.mode = DedupMode::Sim90;
    SampleSet cleaned_serial, cleaned_parallel;
    t_serial = time_ms(
        [&] { cleaned_serial = clean(tests, {&train}, corpus, dedup, RunMode::Serial); });
    t_parallel = time_ms([&] {
        cleaned_parallel = clean(tests, {&train}, corpus, dedup, RunMode::Parallel);
    });
    report("duplicate scan", t_serial, t_parallel);
    if (!cleaned_serial.same_ids(cleaned_parallel)) {
        std::fprintf(stderr, "mismatch in duplicate-scan kernels\n");
        return 1;
    }

    // Bootstrap resampling.
    const auto& a = rep_serial.per_sample.at("exact_match");
    std::vector<double> b = a;
    for (std::size_t i = 0; i < b.size(); i += 3) b[i] = 1.0 - b[i];
    BootstrapConfig bootstrap;
    bootstrap.resamples = 20000;
    double p_serial = 0, p_parallel = 0;
    t_serial =
        time_ms([&] { p_serial = paired_bootstrap(a, b, bootstrap, RunMode::Serial); });
    t_parallel = time_ms(
        [&] { p_parallel = paired_bootstrap(a, b, bootstrap, RunMode::Parallel); });
    report("bootstrap", t_serial, t_parallel);
    if (p_serial != p_parallel) {
        std::fprintf(stderr, "mismatch in bootstrap kernels\n");
        return 1;
    }

    std::printf("\nall kernel pairs agree\n");
    return 0;
}
