#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cseval/corpus.hpp"
#include "cseval/parallel.hpp"

namespace cseval {

enum class Methodology { MixedProject, CrossProject, TimeSegmented };
constexpr std::array<Methodology, 3> kMethodologies = {
    Methodology::MixedProject, Methodology::CrossProject, Methodology::TimeSegmented};

std::string to_string(Methodology m); // "MP", "CP", "T"
Methodology methodology_from_string(std::string_view s);

// The three unordered comparison pairs, in canonical order.
constexpr std::array<std::pair<Methodology, Methodology>, 3> kMethodologyPairs = {{
    {Methodology::MixedProject, Methodology::CrossProject},
    {Methodology::MixedProject, Methodology::TimeSegmented},
    {Methodology::CrossProject, Methodology::TimeSegmented},
}};

std::string pair_label(Methodology a, Methodology b); // "MP-CP", ...

enum class DedupMode { ExactPair, SameCode, SameNl, Sim90 };

std::string to_string(DedupMode mode);
DedupMode dedup_mode_from_string(std::string_view s);

struct DedupConfig {
    DedupMode mode = DedupMode::ExactPair;
    double threshold = 0.9; // used by Sim90

    void validate() const;
};

struct SplitConfig {
    Date tau_minus_2;
    Date tau_minus_1;
    Date tau;
    double r_x = 0.7;
    double r_y = 0.1;
    double r_z = 0.2;
    std::uint64_t seed = 7;
    DedupConfig dedup;

    void validate() const;
};

// Fraction of aligned positions that agree, over the longer length.
double positional_similarity(const std::vector<std::string>& a,
                             const std::vector<std::string>& b);

// Ids per project per time segment: [0] before tau-2, [1] in [tau-2, tau-1),
// [2] in [tau-1, tau). Ids are sorted within each cell.
using TimeSegments = std::map<std::string, std::array<std::vector<std::string>, 3>>;

constexpr std::array<const char*, 3> kSegmentNames = {"early", "mid", "late"};
constexpr std::array<const char*, 3> kPartNames = {"train", "val", "test"};

TimeSegments time_segment(const Corpus& corpus, const SplitConfig& cfg);

// Largest-remainder apportionment of n over (r_x, r_y, r_z); remainder
// ties go to the larger ratio.
std::array<std::size_t, 3> apportion(std::size_t n, double r_x, double r_y, double r_z);

// Seeded shuffle then contiguous cut; the sub-seed comes from cfg.seed and
// the set label, so per-(project, segment) streams are independent.
std::array<SampleSet, 3> in_project_split(const SampleSet& segment,
                                          const SplitConfig& cfg);

// In-project train/val/test parts per project per segment.
using InProjectParts = std::map<std::string, std::array<std::array<std::vector<std::string>, 3>, 3>>;

InProjectParts split_all_projects(const TimeSegments& segments, const SplitConfig& cfg);

// Greedy seeded assignment of whole projects to train/val/test so that
// sample counts approximate r_x : r_y : r_z.
struct ProjectSplit {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
};

ProjectSplit cross_project_split(const Corpus& corpus, const SplitConfig& cfg);

struct GroupedSets {
    SampleSet train;
    SampleSet val;
    SampleSet tests;
};

GroupedSets group(const Corpus& corpus, const TimeSegments& segments,
                  const InProjectParts& in_splits, const ProjectSplit& project_split,
                  Methodology methodology);

// Intersection of two TestS sets, cross-checked against the closed-form
// expression for the pair; throws on mismatch.
SampleSet common_test(const SampleSet& tests_m1, const SampleSet& tests_m2,
                      Methodology m1, Methodology m2, const TimeSegments& segments,
                      const InProjectParts& in_splits, const ProjectSplit& project_split);

struct SplitArtifacts {
    // Final sets keyed "MP/train", "T/tests", "MP-CP/testc", ...
    std::map<std::string, SampleSet> sets;
    // Same keys, before train downsampling and duplicate cleaning.
    std::map<std::string, SampleSet> raw_sets;
    SplitConfig config;
    std::string corpus_digest;
    std::string tool_version;

    const SampleSet& train(Methodology m) const;
    const SampleSet& val(Methodology m) const;
    const SampleSet& tests(Methodology m) const;
    const SampleSet& testc(Methodology a, Methodology b) const;

    std::string to_json() const;
    static SplitArtifacts from_json(const std::string& text);
};

// Step 6a: truncate every Train set to the smallest one's size, each with
// its own derived shuffle stream.
void downsample_trains(SplitArtifacts& artifacts, const SplitConfig& cfg);

// Removes eval samples that duplicate any reference sample under the
// configured mode.
SampleSet clean(const SampleSet& eval_set, const std::vector<const SampleSet*>& references,
                const Corpus& corpus, const DedupConfig& dedup,
                RunMode mode = RunMode::Parallel);

// True for eval samples that duplicate some reference sample; the serial
// reference kernel for clean().
std::vector<char> flag_duplicates(const std::vector<const Sample*>& eval_samples,
                                  const std::vector<const Sample*>& ref_samples,
                                  const DedupConfig& dedup, RunMode mode);

// Steps 1-6 in order, with internal partition checks.
SplitArtifacts run_pipeline(const Corpus& corpus, const SplitConfig& cfg);

void save_manifest(const SplitArtifacts& artifacts, const std::filesystem::path& path);
SplitArtifacts load_manifest(const std::filesystem::path& path);

// Re-verifies every artifact invariant against the corpus; returns
// human-readable violations (empty when clean).
std::vector<std::string> verify_artifacts(const SplitArtifacts& artifacts,
                                          const Corpus& corpus);

} // namespace cseval
