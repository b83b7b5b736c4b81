#include "cseval/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "cseval/rng.hpp"
#include "cseval/subtoken.hpp"
#include "cseval/version.hpp"
#include "json.hpp"

namespace cseval {

using nlohmann::json;

std::string to_string(Methodology m) {
    switch (m) {
        case Methodology::MixedProject: return "MP";
        case Methodology::CrossProject: return "CP";
        case Methodology::TimeSegmented: return "T";
    }
    return {};
}

Methodology methodology_from_string(std::string_view s) {
    if (s == "MP") return Methodology::MixedProject;
    if (s == "CP") return Methodology::CrossProject;
    if (s == "T") return Methodology::TimeSegmented;
    throw std::runtime_error("unknown methodology '" + std::string(s) + "'");
}

std::string pair_label(Methodology a, Methodology b) {
    if (static_cast<int>(a) > static_cast<int>(b)) std::swap(a, b);
    return to_string(a) + "-" + to_string(b);
}

std::string to_string(DedupMode mode) {
    switch (mode) {
        case DedupMode::ExactPair: return "exact-pair";
        case DedupMode::SameCode: return "same-code";
        case DedupMode::SameNl: return "same-nl";
        case DedupMode::Sim90: return "sim90";
    }
    return {};
}

DedupMode dedup_mode_from_string(std::string_view s) {
    if (s == "exact-pair") return DedupMode::ExactPair;
    if (s == "same-code") return DedupMode::SameCode;
    if (s == "same-nl") return DedupMode::SameNl;
    if (s == "sim90") return DedupMode::Sim90;
    throw std::runtime_error("unknown dedup mode '" + std::string(s) + "'");
}

void DedupConfig::validate() const {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw std::runtime_error("dedup threshold must be in (0,1]");
}

void SplitConfig::validate() const {
    if (!(tau_minus_2 < tau_minus_1 && tau_minus_1 < tau))
        throw std::runtime_error("timestamps must satisfy tau-2 < tau-1 < tau");
    if (std::abs(r_x + r_y + r_z - 1.0) > 1e-12)
        throw std::runtime_error("split ratios must sum to 1");
    if (r_x < 0 || r_y < 0 || r_z < 0)
        throw std::runtime_error("split ratios must be nonnegative");
    if (r_x < r_y || r_x < r_z)
        throw std::runtime_error("the train ratio must be the largest");
    dedup.validate();
}

double positional_similarity(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
    std::size_t longer = std::max(a.size(), b.size());
    if (longer == 0) return 1.0;
    std::size_t shorter = std::min(a.size(), b.size());
    std::size_t same = 0;
    for (std::size_t i = 0; i < shorter; ++i)
        if (a[i] == b[i]) ++same;
    return static_cast<double>(same) / static_cast<double>(longer);
}

TimeSegments time_segment(const Corpus& corpus, const SplitConfig& cfg) {
    TimeSegments segments;
    for (const std::string& project : corpus.projects) segments[project] = {};
    for (const Sample& s : corpus.samples) {
        if (!(s.timestamp < cfg.tau))
            throw std::runtime_error("sample '" + s.id + "' is timestamped " +
                                     s.timestamp.to_string() +
                                     ", not before the collection instant " +
                                     cfg.tau.to_string());
        int segment;
        if (s.timestamp < cfg.tau_minus_2)
            segment = 0;
        else if (s.timestamp < cfg.tau_minus_1)
            segment = 1;
        else
            segment = 2;
        segments[s.project][segment].push_back(s.id);
    }
    for (auto& [project, cells] : segments)
        for (auto& ids : cells) std::sort(ids.begin(), ids.end());
    return segments;
}

std::array<std::size_t, 3> apportion(std::size_t n, double r_x, double r_y, double r_z) {
    const double ratios[3] = {r_x, r_y, r_z};
    std::array<std::size_t, 3> sizes{};
    double fracs[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        double quota = ratios[i] * static_cast<double>(n);
        sizes[i] = static_cast<std::size_t>(std::floor(quota));
        fracs[i] = quota - static_cast<double>(sizes[i]);
        assigned += sizes[i];
    }
    // Guard against floating-point inflation of a floor.
    while (assigned > n) {
        int smallest = 0;
        for (int i = 1; i < 3; ++i)
            if (ratios[i] < ratios[smallest] && sizes[i] > 0) smallest = i;
        --sizes[smallest];
        --assigned;
    }
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int a, int b) {
        if (fracs[a] != fracs[b]) return fracs[a] > fracs[b];
        if (ratios[a] != ratios[b]) return ratios[a] > ratios[b];
        return a < b;
    });
    for (int k = 0; assigned < n; ++k) {
        ++sizes[order[k % 3]];
        ++assigned;
    }
    return sizes;
}

std::array<SampleSet, 3> in_project_split(const SampleSet& segment,
                                          const SplitConfig& cfg) {
    std::vector<std::string> ids = segment.ids;
    SplitMix64 rng(derive_seed(cfg.seed, "inproj/" + segment.label));
    fisher_yates(ids, rng);
    auto sizes = apportion(ids.size(), cfg.r_x, cfg.r_y, cfg.r_z);

    std::array<SampleSet, 3> parts;
    std::size_t offset = 0;
    for (int i = 0; i < 3; ++i) {
        std::vector<std::string> cut(ids.begin() + static_cast<long>(offset),
                                     ids.begin() + static_cast<long>(offset + sizes[i]));
        parts[i] = SampleSet(std::move(cut), segment.label + "/" + kPartNames[i]);
        offset += sizes[i];
    }
    return parts;
}

InProjectParts split_all_projects(const TimeSegments& segments, const SplitConfig& cfg) {
    InProjectParts out;
    for (const auto& [project, cells] : segments) {
        auto& per_project = out[project];
        for (int s = 0; s < 3; ++s) {
            SampleSet segment(cells[s], project + "/" + kSegmentNames[s]);
            auto parts = in_project_split(segment, cfg);
            for (int p = 0; p < 3; ++p) per_project[s][p] = parts[p].ids;
        }
    }
    return out;
}

ProjectSplit cross_project_split(const Corpus& corpus, const SplitConfig& cfg) {
    if (corpus.projects.size() < 3)
        throw std::runtime_error("cross-project split needs at least 3 projects, got " +
                                 std::to_string(corpus.projects.size()));

    std::map<std::string, std::size_t> counts;
    for (const std::string& project : corpus.projects) counts[project] = 0;
    for (const Sample& s : corpus.samples) ++counts[s.project];
    double total = static_cast<double>(corpus.samples.size());

    std::vector<std::string> order(corpus.projects.begin(), corpus.projects.end());
    SplitMix64 rng(derive_seed(cfg.seed, "splitprj"));
    fisher_yates(order, rng);

    // Buckets in tie-break priority: train, then test, then val.
    const double targets[3] = {cfg.r_x * total, cfg.r_z * total, cfg.r_y * total};
    double filled[3] = {0, 0, 0};
    std::vector<std::string> buckets[3];
    for (const std::string& project : order) {
        int best = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int b = 0; b < 3; ++b) {
            if (targets[b] <= 0.0) continue;
            double ratio = filled[b] / targets[b];
            if (ratio < best_ratio) {
                best_ratio = ratio;
                best = b;
            }
        }
        if (best < 0) best = 0;
        buckets[best].push_back(project);
        filled[best] += static_cast<double>(counts[project]);
    }

    ProjectSplit split;
    split.train = std::move(buckets[0]);
    split.test = std::move(buckets[1]);
    split.val = std::move(buckets[2]);
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

namespace {

SampleSet merge_ids(std::vector<std::string> ids, std::string label) {
    return SampleSet(std::move(ids), std::move(label));
}

void append(std::vector<std::string>& into, const std::vector<std::string>& from) {
    into.insert(into.end(), from.begin(), from.end());
}

} // namespace

GroupedSets group(const Corpus& corpus, const TimeSegments& segments,
                  const InProjectParts& in_splits, const ProjectSplit& project_split,
                  Methodology methodology) {
    (void)corpus;
    std::vector<std::string> train, val, tests;
    const std::string label = to_string(methodology);

    switch (methodology) {
        case Methodology::MixedProject:
            // In-project parts, unioned over every project and segment.
            for (const auto& [project, per_segment] : in_splits) {
                for (int s = 0; s < 3; ++s) {
                    append(train, per_segment[s][0]);
                    append(val, per_segment[s][1]);
                    append(tests, per_segment[s][2]);
                }
            }
            break;
        case Methodology::CrossProject: {
            // Whole projects per bucket, all segments.
            auto collect = [&](const std::vector<std::string>& projects,
                               std::vector<std::string>& into) {
                for (const std::string& p : projects)
                    for (const auto& ids : segments.at(p)) append(into, ids);
            };
            collect(project_split.train, train);
            collect(project_split.val, val);
            collect(project_split.test, tests);
            break;
        }
        case Methodology::TimeSegmented:
            // Whole segments over every project.
            for (const auto& [project, cells] : segments) {
                append(train, cells[0]);
                append(val, cells[1]);
                append(tests, cells[2]);
            }
            break;
    }

    return GroupedSets{merge_ids(std::move(train), label + "/train"),
                       merge_ids(std::move(val), label + "/val"),
                       merge_ids(std::move(tests), label + "/tests")};
}

SampleSet common_test(const SampleSet& tests_m1, const SampleSet& tests_m2,
                      Methodology m1, Methodology m2, const TimeSegments& segments,
                      const InProjectParts& in_splits, const ProjectSplit& project_split) {
    if (static_cast<int>(m1) > static_cast<int>(m2)) {
        return common_test(tests_m2, tests_m1, m2, m1, segments, in_splits,
                           project_split);
    }
    const std::string label = pair_label(m1, m2) + "/testc";
    SampleSet intersection = tests_m1.intersect(tests_m2, label);

    // Closed form for the pair.
    std::vector<std::string> closed;
    if (m1 == Methodology::MixedProject && m2 == Methodology::CrossProject) {
        for (const std::string& p : project_split.test)
            for (int s = 0; s < 3; ++s) append(closed, in_splits.at(p)[s][2]);
    } else if (m1 == Methodology::MixedProject && m2 == Methodology::TimeSegmented) {
        for (const auto& [project, per_segment] : in_splits)
            append(closed, per_segment[2][2]);
    } else {
        for (const std::string& p : project_split.test) append(closed, segments.at(p)[2]);
    }
    SampleSet closed_set = merge_ids(std::move(closed), label);

    if (!intersection.same_ids(closed_set))
        throw std::runtime_error("internal consistency failure: " + label +
                                 " intersection (" + std::to_string(intersection.size()) +
                                 " ids) does not match its closed form (" +
                                 std::to_string(closed_set.size()) + " ids)");
    return intersection;
}

const SampleSet& SplitArtifacts::train(Methodology m) const {
    return sets.at(to_string(m) + "/train");
}
const SampleSet& SplitArtifacts::val(Methodology m) const {
    return sets.at(to_string(m) + "/val");
}
const SampleSet& SplitArtifacts::tests(Methodology m) const {
    return sets.at(to_string(m) + "/tests");
}
const SampleSet& SplitArtifacts::testc(Methodology a, Methodology b) const {
    return sets.at(pair_label(a, b) + "/testc");
}

void downsample_trains(SplitArtifacts& artifacts, const SplitConfig& cfg) {
    std::size_t size = std::numeric_limits<std::size_t>::max();
    for (Methodology m : kMethodologies) size = std::min(size, artifacts.train(m).size());
    for (Methodology m : kMethodologies) {
        const std::string key = to_string(m) + "/train";
        std::vector<std::string> ids = artifacts.sets.at(key).ids;
        SplitMix64 rng(derive_seed(cfg.seed, "downsample/" + to_string(m)));
        fisher_yates(ids, rng);
        ids.resize(size);
        artifacts.sets[key] = SampleSet(std::move(ids), key);
    }
}

std::vector<char> flag_duplicates(const std::vector<const Sample*>& eval_samples,
                                  const std::vector<const Sample*>& ref_samples,
                                  const DedupConfig& dedup, RunMode mode) {
    std::vector<char> flags(eval_samples.size(), 0);
    const long n = static_cast<long>(eval_samples.size());

    if (dedup.mode == DedupMode::Sim90) {
        auto is_dup = [&](std::size_t i) {
            const Sample& e = *eval_samples[i];
            for (const Sample* r : ref_samples) {
                if (positional_similarity(e.code_subtokens, r->code_subtokens) >
                        dedup.threshold &&
                    positional_similarity(e.summary_subtokens, r->summary_subtokens) >
                        dedup.threshold)
                    return char(1);
            }
            return char(0);
        };
        if (mode == RunMode::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
            for (long i = 0; i < n; ++i)
                flags[static_cast<std::size_t>(i)] = is_dup(static_cast<std::size_t>(i));
        } else {
            for (long i = 0; i < n; ++i)
                flags[static_cast<std::size_t>(i)] = is_dup(static_cast<std::size_t>(i));
        }
        return flags;
    }

    auto key_of = [&](const Sample& s) -> std::string {
        std::string code = join_subtokens(s.code_subtokens, "\x1f");
        std::string nl = join_subtokens(s.summary_subtokens, "\x1f");
        switch (dedup.mode) {
            case DedupMode::SameCode: return code;
            case DedupMode::SameNl: return nl;
            default: return code + '\x1e' + nl;
        }
    };

    std::unordered_set<std::string> ref_keys;
    ref_keys.reserve(ref_samples.size() * 2);
    for (const Sample* r : ref_samples) ref_keys.insert(key_of(*r));

    if (mode == RunMode::Parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i)
            flags[static_cast<std::size_t>(i)] =
                ref_keys.count(key_of(*eval_samples[static_cast<std::size_t>(i)])) ? 1 : 0;
    } else {
        for (long i = 0; i < n; ++i)
            flags[static_cast<std::size_t>(i)] =
                ref_keys.count(key_of(*eval_samples[static_cast<std::size_t>(i)])) ? 1 : 0;
    }
    return flags;
}

SampleSet clean(const SampleSet& eval_set, const std::vector<const SampleSet*>& references,
                const Corpus& corpus, const DedupConfig& dedup, RunMode mode) {
    dedup.validate();
    std::vector<const Sample*> eval_samples;
    eval_samples.reserve(eval_set.size());
    for (const std::string& id : eval_set.ids) eval_samples.push_back(&corpus.at(id));

    std::vector<const Sample*> ref_samples;
    for (const SampleSet* set : references)
        for (const std::string& id : set->ids) ref_samples.push_back(&corpus.at(id));

    std::vector<char> flags = flag_duplicates(eval_samples, ref_samples, dedup, mode);
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < eval_set.size(); ++i)
        if (!flags[i]) kept.push_back(eval_set.ids[i]);
    return SampleSet(std::move(kept), eval_set.label);
}

namespace {

void check_partition(const Corpus& corpus, const GroupedSets& grouped,
                     const std::string& label) {
    SampleSet all = grouped.train.unite(grouped.val).unite(grouped.tests);
    if (all.size() != grouped.train.size() + grouped.val.size() + grouped.tests.size())
        throw std::runtime_error("internal consistency failure: " + label +
                                 " train/val/tests overlap");
    if (all.ids != corpus.sorted_ids())
        throw std::runtime_error("internal consistency failure: " + label +
                                 " sets do not partition the corpus");
}

} // namespace

SplitArtifacts run_pipeline(const Corpus& corpus, const SplitConfig& cfg) {
    cfg.validate();
    TimeSegments segments = time_segment(corpus, cfg);
    InProjectParts in_splits = split_all_projects(segments, cfg);
    ProjectSplit project_split = cross_project_split(corpus, cfg);

    SplitArtifacts artifacts;
    artifacts.config = cfg;
    artifacts.corpus_digest = corpus_digest(corpus);
    artifacts.tool_version = kToolVersion;

    std::map<Methodology, GroupedSets> grouped;
    for (Methodology m : kMethodologies) {
        grouped[m] = group(corpus, segments, in_splits, project_split, m);
        check_partition(corpus, grouped[m], to_string(m));
        artifacts.raw_sets[grouped[m].train.label] = grouped[m].train;
        artifacts.raw_sets[grouped[m].val.label] = grouped[m].val;
        artifacts.raw_sets[grouped[m].tests.label] = grouped[m].tests;
    }
    for (auto [a, b] : kMethodologyPairs) {
        SampleSet testc = common_test(grouped[a].tests, grouped[b].tests, a, b, segments,
                                      in_splits, project_split);
        artifacts.raw_sets[testc.label] = testc;
    }

    artifacts.sets = artifacts.raw_sets;
    downsample_trains(artifacts, cfg);

    // Duplicate cleaning, in formula order: Val against Train, TestS against
    // Train and the already-cleaned Val, TestC against both sides' pairs.
    for (Methodology m : kMethodologies) {
        const std::string tag = to_string(m);
        const SampleSet& train = artifacts.sets.at(tag + "/train");
        artifacts.sets[tag + "/val"] =
            clean(artifacts.sets.at(tag + "/val"), {&train}, corpus, cfg.dedup);
        const SampleSet& val = artifacts.sets.at(tag + "/val");
        artifacts.sets[tag + "/tests"] =
            clean(artifacts.sets.at(tag + "/tests"), {&train, &val}, corpus, cfg.dedup);
    }
    for (auto [a, b] : kMethodologyPairs) {
        const std::string key = pair_label(a, b) + "/testc";
        artifacts.sets[key] = clean(
            artifacts.sets.at(key),
            {&artifacts.sets.at(to_string(a) + "/train"),
             &artifacts.sets.at(to_string(a) + "/val"),
             &artifacts.sets.at(to_string(b) + "/train"),
             &artifacts.sets.at(to_string(b) + "/val")},
            corpus, cfg.dedup);
    }
    return artifacts;
}

namespace {

json config_to_json(const SplitConfig& cfg) {
    json j;
    j["tau_minus_2"] = cfg.tau_minus_2.to_string();
    j["tau_minus_1"] = cfg.tau_minus_1.to_string();
    j["tau"] = cfg.tau.to_string();
    j["r_x"] = cfg.r_x;
    j["r_y"] = cfg.r_y;
    j["r_z"] = cfg.r_z;
    j["seed"] = cfg.seed;
    j["dedup"] = {{"mode", to_string(cfg.dedup.mode)},
                  {"threshold", cfg.dedup.threshold}};
    return j;
}

SplitConfig config_from_json(const json& j) {
    SplitConfig cfg;
    cfg.tau_minus_2 = Date::parse(j.at("tau_minus_2").get<std::string>());
    cfg.tau_minus_1 = Date::parse(j.at("tau_minus_1").get<std::string>());
    cfg.tau = Date::parse(j.at("tau").get<std::string>());
    cfg.r_x = j.at("r_x").get<double>();
    cfg.r_y = j.at("r_y").get<double>();
    cfg.r_z = j.at("r_z").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.dedup.mode = dedup_mode_from_string(j.at("dedup").at("mode").get<std::string>());
    cfg.dedup.threshold = j.at("dedup").at("threshold").get<double>();
    return cfg;
}

json sets_to_json(const std::map<std::string, SampleSet>& sets) {
    json j = json::object();
    for (const auto& [key, set] : sets) j[key] = set.ids;
    return j;
}

std::map<std::string, SampleSet> sets_from_json(const json& j) {
    std::map<std::string, SampleSet> sets;
    for (auto it = j.begin(); it != j.end(); ++it) {
        SampleSet set;
        set.label = it.key();
        set.ids = it.value().get<std::vector<std::string>>();
        sets[it.key()] = std::move(set);
    }
    return sets;
}

} // namespace

std::string SplitArtifacts::to_json() const {
    json j;
    j["format"] = "cseval-split-manifest";
    j["version"] = 1;
    j["provenance"] = {{"config", config_to_json(config)},
                       {"corpus_digest", corpus_digest},
                       {"tool_version", tool_version}};
    j["sets"] = sets_to_json(sets);
    j["pre_clean"] = sets_to_json(raw_sets);
    return j.dump(2) + "\n";
}

SplitArtifacts SplitArtifacts::from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("format", "") != "cseval-split-manifest")
        throw std::runtime_error("not a split manifest");
    SplitArtifacts artifacts;
    artifacts.config = config_from_json(j.at("provenance").at("config"));
    artifacts.corpus_digest = j.at("provenance").at("corpus_digest").get<std::string>();
    artifacts.tool_version = j.at("provenance").at("tool_version").get<std::string>();
    artifacts.sets = sets_from_json(j.at("sets"));
    artifacts.raw_sets = sets_from_json(j.at("pre_clean"));
    return artifacts;
}

void save_manifest(const SplitArtifacts& artifacts, const std::filesystem::path& path) {
    atomic_write(path, artifacts.to_json());
}

SplitArtifacts load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open manifest '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return SplitArtifacts::from_json(buf.str());
}

std::vector<std::string> verify_artifacts(const SplitArtifacts& artifacts,
                                          const Corpus& corpus) {
    std::vector<std::string> violations;
    auto complain = [&](std::string msg) { violations.push_back(std::move(msg)); };

    const SplitConfig& cfg = artifacts.config;
    if (artifacts.corpus_digest != corpus_digest(corpus))
        complain("corpus digest mismatch: manifest was built from a different corpus");

    for (const auto& [key, set] : artifacts.sets) {
        for (const std::string& id : set.ids)
            if (!corpus.contains(id)) {
                complain("set " + key + " references unknown id '" + id + "'");
                break;
            }
        if (!artifacts.raw_sets.count(key)) {
            complain("set " + key + " has no pre-clean counterpart");
            continue;
        }
        const SampleSet& raw = artifacts.raw_sets.at(key);
        for (const std::string& id : set.ids)
            if (!raw.contains(id)) {
                complain("set " + key + " contains id '" + id +
                         "' absent from its pre-clean version");
                break;
            }
    }

    auto ids_of = [&](const std::string& key,
                      const std::map<std::string, SampleSet>& from) -> const SampleSet& {
        return from.at(key);
    };

    std::vector<std::size_t> train_sizes;
    for (Methodology m : kMethodologies) {
        const std::string tag = to_string(m);
        for (const auto* source : {&artifacts.sets, &artifacts.raw_sets}) {
            const bool raw = source == &artifacts.raw_sets;
            const SampleSet& train = ids_of(tag + "/train", *source);
            const SampleSet& val = ids_of(tag + "/val", *source);
            const SampleSet& tests = ids_of(tag + "/tests", *source);
            const std::string where = tag + (raw ? " (pre-clean)" : "");

            SampleSet all = train.unite(val).unite(tests);
            if (all.size() != train.size() + val.size() + tests.size())
                complain(where + ": train/val/tests are not disjoint");
            if (raw && all.ids != corpus.sorted_ids())
                complain(where + ": train/val/tests do not partition the corpus");

            if (m == Methodology::TimeSegmented) {
                for (const std::string& id : train.ids)
                    if (!(corpus.at(id).timestamp < cfg.tau_minus_2)) {
                        complain(where + ": train sample '" + id + "' not before tau-2");
                        break;
                    }
                for (const std::string& id : val.ids) {
                    const Date& t = corpus.at(id).timestamp;
                    if (!(cfg.tau_minus_2 <= t && t < cfg.tau_minus_1)) {
                        complain(where + ": val sample '" + id + "' outside [tau-2, tau-1)");
                        break;
                    }
                }
                for (const std::string& id : tests.ids) {
                    const Date& t = corpus.at(id).timestamp;
                    if (!(cfg.tau_minus_1 <= t && t < cfg.tau)) {
                        complain(where + ": test sample '" + id + "' outside [tau-1, tau)");
                        break;
                    }
                }
            }
            if (m == Methodology::CrossProject) {
                std::set<std::string> train_projects, val_projects, test_projects;
                for (const std::string& id : train.ids)
                    train_projects.insert(corpus.at(id).project);
                for (const std::string& id : val.ids)
                    val_projects.insert(corpus.at(id).project);
                for (const std::string& id : tests.ids)
                    test_projects.insert(corpus.at(id).project);
                for (const std::string& p : val_projects)
                    if (train_projects.count(p))
                        complain(where + ": project '" + p + "' in both train and val");
                for (const std::string& p : test_projects)
                    if (train_projects.count(p) || val_projects.count(p))
                        complain(where + ": project '" + p + "' leaks into test");
            }
        }
        train_sizes.push_back(artifacts.sets.at(tag + "/train").size());
    }
    if (!(train_sizes[0] == train_sizes[1] && train_sizes[1] == train_sizes[2]))
        complain("downsampled train sizes differ");

    for (auto [a, b] : kMethodologyPairs) {
        const std::string key = pair_label(a, b) + "/testc";
        const SampleSet& raw_testc = artifacts.raw_sets.at(key);
        SampleSet expected = artifacts.raw_sets.at(to_string(a) + "/tests")
                                 .intersect(artifacts.raw_sets.at(to_string(b) + "/tests"));
        if (!raw_testc.same_ids(expected))
            complain(key + " (pre-clean) is not the intersection of its TestS sets");
    }

    // Re-scan: no surviving eval sample may duplicate a reference sample.
    auto rescan = [&](const SampleSet& eval_set,
                      const std::vector<const SampleSet*>& refs, const std::string& what) {
        SampleSet cleaned = clean(eval_set, refs, corpus, cfg.dedup);
        if (!cleaned.same_ids(eval_set))
            complain(what + " still contains duplicates of its reference sets");
    };
    for (Methodology m : kMethodologies) {
        const std::string tag = to_string(m);
        const SampleSet& train = artifacts.sets.at(tag + "/train");
        const SampleSet& val = artifacts.sets.at(tag + "/val");
        rescan(val, {&train}, tag + "/val");
        rescan(artifacts.sets.at(tag + "/tests"), {&train, &val}, tag + "/tests");
    }
    for (auto [a, b] : kMethodologyPairs) {
        const std::string key = pair_label(a, b) + "/testc";
        rescan(artifacts.sets.at(key),
               {&artifacts.sets.at(to_string(a) + "/train"),
                &artifacts.sets.at(to_string(a) + "/val"),
                &artifacts.sets.at(to_string(b) + "/train"),
                &artifacts.sets.at(to_string(b) + "/val")},
               key);
    }
    return violations;
}

} // namespace cseval
