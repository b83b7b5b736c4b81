#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cseval/rng.hpp"
#include "cseval/stats.hpp"

using namespace cseval;

namespace {

std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = rng.next_unit();
    return out;
}

MetricReport report_with(const std::string& model, const std::vector<double>& scores) {
    MetricReport r;
    r.model_id = model;
    r.set_label = "S/tests";
    r.sample_count = scores.size();
    r.per_sample["m"] = scores;
    double sum = 0;
    for (double v : scores) sum += v;
    r.aggregates["m"] = sum / double(scores.size());
    return r;
}

} // namespace

TEST_CASE("identical score vectors are not significant") {
    std::vector<double> a = random_scores(100, 4);
    BootstrapConfig cfg;
    double p = paired_bootstrap(a, a, cfg);
    CHECK(p > 0.45);
    CHECK(p < 0.55);
}

TEST_CASE("fully separated vectors give p = 0") {
    std::vector<double> a(100, 1.0), b(100, 0.0);
    BootstrapConfig cfg;
    CHECK(paired_bootstrap(a, b, cfg) == 0.0);
    // Orientation swaps to the better system.
    CHECK(paired_bootstrap(b, a, cfg) == 0.0);
}

TEST_CASE("minimal two-sample input runs") {
    std::vector<double> a{0.2, 0.4}, b{0.1, 0.5};
    BootstrapConfig cfg;
    double p = paired_bootstrap(a, b, cfg);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
}

TEST_CASE("bootstrap input validation") {
    BootstrapConfig cfg;
    CHECK_THROWS(paired_bootstrap({1.0}, {0.5}, cfg));
    CHECK_THROWS(paired_bootstrap({1.0, 0.2}, {0.5}, cfg));
    BootstrapConfig bad = cfg;
    bad.resamples = 10;
    CHECK_THROWS(paired_bootstrap({1.0, 0.2}, {0.5, 0.1}, bad));
    bad = cfg;
    bad.confidence = 1.5;
    CHECK_THROWS(paired_bootstrap({1.0, 0.2}, {0.5, 0.1}, bad));
}

TEST_CASE("deterministic under a fixed seed, serial equals parallel") {
    std::vector<double> a = random_scores(200, 8);
    std::vector<double> b = random_scores(200, 9);
    BootstrapConfig cfg;
    cfg.seed = 1234;
    double p1 = paired_bootstrap(a, b, cfg, RunMode::Parallel);
    double p2 = paired_bootstrap(a, b, cfg, RunMode::Parallel);
    double p3 = paired_bootstrap(a, b, cfg, RunMode::Serial);
    CHECK(p1 == p2);
    CHECK(p1 == p3);
}

TEST_CASE("p decreases as a constant offset widens the gap") {
    std::vector<double> base = random_scores(150, 21);
    std::vector<double> b = base;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.9 * b[i];
    BootstrapConfig cfg;
    cfg.seed = 5;
    double previous = 1.1;
    bool strictly_dropped = false;
    for (double offset : {0.0, 0.02, 0.05, 0.1, 0.2, 0.4}) {
        std::vector<double> a = base;
        for (double& v : a) v = std::min(1.0, v + offset);
        double p = paired_bootstrap(a, b, cfg);
        CHECK(p <= previous);
        if (p < previous && previous <= 1.0) strictly_dropped = true;
        previous = p;
    }
    CHECK(strictly_dropped);
}

TEST_CASE("joint permutation moves p by at most sampling noise") {
    std::vector<double> a = random_scores(300, 33);
    std::vector<double> b = a;
    SplitMix64 noise(77);
    for (double& v : b) v = std::clamp(v + (noise.next_unit() - 0.45) * 0.2, 0.0, 1.0);
    BootstrapConfig cfg;
    cfg.seed = 11;
    double p = paired_bootstrap(a, b, cfg);

    std::vector<std::size_t> perm(a.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    SplitMix64 rng(3);
    fisher_yates(perm, rng);
    std::vector<double> pa(a.size()), pb(a.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        pa[i] = a[perm[i]];
        pb[i] = b[perm[i]];
    }
    double p_permuted = paired_bootstrap(pa, pb, cfg);
    CHECK(std::abs(p - p_permuted) < 0.02);
}

TEST_CASE("significance groups") {
    BootstrapConfig cfg;
    cfg.seed = 2;

    SUBCASE("identical models share a group") {
        std::vector<double> scores = random_scores(80, 12);
        MetricReport r1 = report_with("m1", scores);
        MetricReport r2 = report_with("m2", scores);
        SignificanceResult sig = significance_groups({&r1, &r2}, "m", cfg);
        REQUIRE(sig.groups.size() == 1);
        CHECK(sig.groups.front().size() == 2);
        auto letters = sig.letters();
        CHECK(letters.at("m1") == letters.at("m2"));
    }

    SUBCASE("a clearly dominant model stands alone") {
        std::vector<double> low1 = random_scores(120, 13), low2 = random_scores(120, 14);
        for (double& v : low1) v *= 0.2;
        for (double& v : low2) v *= 0.2;
        std::vector<double> high = random_scores(120, 15);
        for (double& v : high) v = 0.8 + 0.2 * v;
        MetricReport r1 = report_with("weak-a", low1);
        MetricReport r2 = report_with("weak-b", low2);
        MetricReport r3 = report_with("strong", high);
        SignificanceResult sig = significance_groups({&r1, &r2, &r3}, "m", cfg);
        bool strong_alone = false;
        for (const auto& group : sig.groups)
            if (group == std::vector<std::string>{"strong"}) strong_alone = true;
        CHECK(strong_alone);
        CHECK(sig.p_values.size() == 3);
    }

    SUBCASE("single model forms a singleton group") {
        MetricReport r = report_with("only", random_scores(50, 16));
        SignificanceResult sig = significance_groups({&r}, "m", cfg);
        REQUIRE(sig.groups.size() == 1);
        CHECK(sig.groups.front() == std::vector<std::string>{"only"});
    }

    SUBCASE("mismatched sets are rejected") {
        MetricReport r1 = report_with("a", random_scores(50, 17));
        MetricReport r2 = report_with("b", random_scores(60, 18));
        CHECK_THROWS(significance_groups({&r1, &r2}, "m", cfg));
        MetricReport r3 = report_with("c", random_scores(50, 19));
        r3.set_label = "other";
        CHECK_THROWS(significance_groups({&r1, &r3}, "m", cfg));
    }
}

TEST_CASE("groups are the connected components of the non-significance relation") {
    BootstrapConfig cfg;
    cfg.seed = 6;
    std::vector<const MetricReport*> pointers;
    std::vector<MetricReport> reports;
    reports.push_back(report_with("a", random_scores(100, 20)));
    std::vector<double> near = reports[0].per_sample["m"];
    SplitMix64 rng(21);
    for (double& v : near) v = std::clamp(v + (rng.next_unit() - 0.5) * 0.05, 0.0, 1.0);
    reports.push_back(report_with("b", near));
    std::vector<double> far(100, 0.01);
    reports.push_back(report_with("c", far));
    for (const auto& r : reports) pointers.push_back(&r);

    SignificanceResult sig = significance_groups(pointers, "m", cfg);
    const double alpha = 1.0 - cfg.confidence;

    // Recompute components by brute force from the published p-values.
    std::vector<std::vector<std::size_t>> adj(3);
    auto idx = [&](const std::string& m) {
        return std::size_t(std::find(sig.models.begin(), sig.models.end(), m) -
                           sig.models.begin());
    };
    for (const auto& [pair, p] : sig.p_values)
        if (p >= alpha) {
            adj[idx(pair.first)].push_back(idx(pair.second));
            adj[idx(pair.second)].push_back(idx(pair.first));
        }
    std::vector<int> component(3, -1);
    int components = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (component[i] != -1) continue;
        std::vector<std::size_t> stack{i};
        component[i] = components;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : adj[v])
                if (component[w] == -1) {
                    component[w] = components;
                    stack.push_back(w);
                }
        }
        ++components;
    }
    CHECK(sig.groups.size() == std::size_t(components));
    for (const auto& group : sig.groups)
        for (const auto& member : group)
            CHECK(component[idx(member)] == component[idx(group.front())]);
}
