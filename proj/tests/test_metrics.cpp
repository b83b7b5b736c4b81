#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cseval/harness.hpp"
#include "cseval/metrics.hpp"
#include "cseval/rng.hpp"
#include "cseval/subtoken.hpp"
#include "metric_oracles.hpp"

using namespace cseval;

namespace {

Tokens tok(const std::string& text) { return subtokenize(text); }

Tokens random_tokens(SplitMix64& rng, std::size_t max_len, std::size_t vocab) {
    Tokens out;
    std::size_t len = 1 + rng.next_below(max_len);
    for (std::size_t i = 0; i < len; ++i)
        out.push_back("t" + std::to_string(rng.next_below(vocab)));
    return out;
}

} // namespace

TEST_CASE("bleu4 fixtures") {
    CHECK(bleu4(tok("a b c d"), tok("a b c d")) == doctest::Approx(1.0));
    CHECK(bleu4(tok("a b c d"), tok("a b c e")) == doctest::Approx(0.658).epsilon(0.002));
    CHECK(bleu4({}, tok("a b")) == 0.0);
    // Shorter-than-ref prediction gets the brevity penalty.
    CHECK(bleu4(tok("a b"), tok("a b c d")) ==
          doctest::Approx(std::exp(1.0 - 4.0 / 2.0) * 1.0));
}

TEST_CASE("bleu4 equals 1 exactly on identical nonempty inputs") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Tokens a = random_tokens(rng, 12, 5);
        CHECK(bleu4(a, a) == doctest::Approx(1.0));
        Tokens b = random_tokens(rng, 12, 5);
        if (a != b) CHECK(bleu4(a, b) < 1.0);
    }
}

TEST_CASE("meteor fixtures") {
    CHECK(meteor(tok("a b c"), tok("a b c")) == doctest::Approx(0.9815).epsilon(0.001));
    CHECK(meteor(tok("x y"), tok("a b")) == 0.0);
    CHECK(meteor(tok("b a"), tok("a b")) == doctest::Approx(0.5));
    CHECK(meteor({}, tok("a")) == 0.0);
}

TEST_CASE("meteor identity equals 1 - 0.5/m^3") {
    for (std::size_t m = 1; m <= 10; ++m) {
        Tokens seq;
        for (std::size_t i = 0; i < m; ++i) seq.push_back("w" + std::to_string(i));
        double expected = 1.0 - 0.5 / double(m * m * m);
        CHECK(meteor(seq, seq) == doctest::Approx(expected));
    }
}

TEST_CASE("rouge_l fixtures") {
    Prf r = rouge_l(tok("a c d"), tok("a b c d"));
    CHECK(r.precision == doctest::Approx(1.0));
    CHECK(r.recall == doctest::Approx(0.75));
    CHECK(r.f == doctest::Approx(0.857).epsilon(0.002));
    Prf same = rouge_l(tok("a b"), tok("a b"));
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);
    CHECK(same.f == 1.0);
    Prf disjoint = rouge_l(tok("a b"), tok("c d"));
    CHECK(disjoint.f == 0.0);
    CHECK(rouge_l({}, tok("a")).f == 0.0);
}

TEST_CASE("exact match") {
    CHECK(exact_match(tok("a b"), tok("a b")) == 1.0);
    CHECK(exact_match(subtokenize("getName"), subtokenize("GET_NAME")) == 1.0);
    CHECK(exact_match(tok("a b"), tok("a c")) == 0.0);
}

TEST_CASE("set match fixtures") {
    Prf p = set_match_prf(tok("get name"), tok("get user name"));
    CHECK(p.precision == doctest::Approx(1.0));
    CHECK(p.recall == doctest::Approx(2.0 / 3.0));
    CHECK(p.f == doctest::Approx(0.8));
    Prf same = set_match_prf(tok("a b"), tok("a b"));
    CHECK(same.f == 1.0);
    Prf multi = set_match_prf(tok("get get"), tok("get"));
    CHECK(multi.precision == doctest::Approx(0.5));
    CHECK(multi.recall == doctest::Approx(1.0));
    CHECK(multi.f == doctest::Approx(2.0 / 3.0));
    CHECK(set_match_prf({}, tok("a")).f == 0.0);
}

TEST_CASE("bleu and rouge agree with brute-force oracles") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 400; ++trial) {
        Tokens pred = random_tokens(rng, 30, 8);
        Tokens ref = random_tokens(rng, 30, 8);
        CHECK(std::abs(bleu4(pred, ref) - oracles::bleu4_oracle(pred, ref)) < 1e-9);
        Prf mine = rouge_l(pred, ref);
        Prf oracle = oracles::rouge_oracle(pred, ref);
        CHECK(std::abs(mine.f - oracle.f) < 1e-9);
        CHECK(std::abs(mine.precision - oracle.precision) < 1e-9);
        Prf sm = set_match_prf(pred, ref);
        Prf smo = oracles::set_match_oracle(pred, ref);
        CHECK(sm.precision == smo.precision);
        CHECK(sm.recall == smo.recall);
        CHECK(sm.f == smo.f);
    }
}

TEST_CASE("rouge precision/recall swap under argument swap") {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        Tokens a = random_tokens(rng, 15, 6);
        Tokens b = random_tokens(rng, 15, 6);
        CHECK(rouge_l(a, b).precision == doctest::Approx(rouge_l(b, a).recall));
    }
}

TEST_CASE("set match F1 is symmetric on equal-length inputs") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        Tokens a = random_tokens(rng, 10, 4);
        Tokens b = a;
        for (auto& t : b)
            if (rng.next_below(2)) t = "t" + std::to_string(rng.next_below(4));
        REQUIRE(a.size() == b.size());
        CHECK(set_match_prf(a, b).f == doctest::Approx(set_match_prf(b, a).f));
    }
}

TEST_CASE("metrics are pure") {
    Tokens pred = tok("a b c"), ref = tok("a c b");
    CHECK(bleu4(pred, ref) == bleu4(pred, ref));
    CHECK(meteor(pred, ref) == meteor(pred, ref));
}

namespace {

Corpus tiny_eval_corpus(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.id = "s" + std::to_string(1000 + i);
        s.project = "p";
        s.timestamp = Date::parse("2019-03-04");
        s.code = "int f() { return " + std::to_string(i) + "; }";
        s.summary = join_subtokens(random_tokens(rng, 8, 6), " ");
        s.task = Task::CommentGeneration;
        samples.push_back(std::move(s));
    }
    return Corpus::from_samples(std::move(samples));
}

} // namespace

TEST_CASE("evaluate_set computes per-sample scores and means") {
    Corpus corpus = tiny_eval_corpus(100, 77);
    SampleSet set(corpus.sorted_ids(), "X/tests");

    SUBCASE("identity predictions score 1 except meteor") {
        std::vector<Tokens> preds;
        for (const std::string& id : set.ids)
            preds.push_back(corpus.at(id).summary_subtokens);
        MetricReport report = evaluate_set(preds, set, corpus, "oracle");
        CHECK(report.aggregates.at("bleu4") == doctest::Approx(1.0));
        CHECK(report.aggregates.at("exact_match") == doctest::Approx(1.0));
        CHECK(report.aggregates.at("rouge_l_f") == doctest::Approx(1.0));
        double meteor_mean = 0;
        for (const std::string& id : set.ids) {
            const auto& gold = corpus.at(id).summary_subtokens;
            meteor_mean += meteor(gold, gold);
        }
        meteor_mean /= double(set.size());
        CHECK(report.aggregates.at("meteor") == doctest::Approx(meteor_mean));
    }

    SUBCASE("random predictions match an independent recomputation") {
        SplitMix64 rng(5);
        std::vector<Tokens> preds;
        for (std::size_t i = 0; i < set.size(); ++i)
            preds.push_back(random_tokens(rng, 8, 6));
        MetricReport report = evaluate_set(preds, set, corpus, "rand");
        for (const std::string& metric : metric_names(Task::CommentGeneration)) {
            const auto& values = report.per_sample.at(metric);
            double sum = 0;
            for (double v : values) sum += v;
            CHECK(report.aggregates.at(metric) ==
                  doctest::Approx(sum / double(values.size())).epsilon(1e-12));
            for (double v : values) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
        // Spot-check bleu against the oracle through the report.
        for (std::size_t i = 0; i < set.size(); i += 17) {
            const auto& gold = corpus.at(set.ids[i]).summary_subtokens;
            CHECK(report.per_sample.at("bleu4")[i] ==
                  doctest::Approx(oracles::bleu4_oracle(preds[i], gold)).epsilon(1e-9));
        }
    }

    SUBCASE("serial and parallel scoring agree") {
        SplitMix64 rng(6);
        std::vector<Tokens> preds;
        for (std::size_t i = 0; i < set.size(); ++i)
            preds.push_back(random_tokens(rng, 8, 6));
        MetricReport serial = evaluate_set(preds, set, corpus, "m", RunMode::Serial);
        MetricReport parallel = evaluate_set(preds, set, corpus, "m", RunMode::Parallel);
        CHECK(serial.per_sample == parallel.per_sample);
        CHECK(serial.aggregates == parallel.aggregates);
    }

    SUBCASE("prediction count mismatch names the set") {
        std::vector<Tokens> preds(3);
        CHECK_THROWS_WITH_AS(evaluate_set(preds, set, corpus, "m"),
                             doctest::Contains("X/tests"), std::runtime_error);
    }
}

TEST_CASE("evaluating the empty set yields an empty report") {
    Corpus corpus = tiny_eval_corpus(3, 1);
    SampleSet empty({}, "E/tests");
    MetricReport report = evaluate_set({}, empty, corpus, "m");
    CHECK(report.sample_count == 0);
    CHECK(report.aggregates.empty());
}

TEST_CASE("report JSON round-trip") {
    Corpus corpus = tiny_eval_corpus(10, 3);
    SampleSet set(corpus.sorted_ids(), "R/tests");
    std::vector<Tokens> preds;
    for (const std::string& id : set.ids)
        preds.push_back(corpus.at(id).summary_subtokens);
    MetricReport report = evaluate_set(preds, set, corpus, "m");
    MetricReport loaded = MetricReport::from_json(report.to_json());
    CHECK(loaded.model_id == report.model_id);
    CHECK(loaded.set_label == report.set_label);
    CHECK(loaded.per_sample == report.per_sample);
    CHECK(loaded.aggregates == report.aggregates);
}
