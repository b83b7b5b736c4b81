#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cseval/date.hpp"

namespace cseval {

enum class Task { CommentGeneration, MethodNaming };

std::string to_string(Task task);
Task task_from_string(std::string_view s);

/// One (code, summary) record. Subtoken fields are derived from the raw
/// text and never serialized. For the method-naming task the summary field
/// holds the original name, so summary_subtokens are the name's subtokens.
struct Sample {
    std::string id;
    std::string project;
    Date timestamp;
    std::string code;
    std::string summary;
    std::string name; // empty when unknown
    Task task = Task::CommentGeneration;

    std::vector<std::string> code_subtokens;
    std::vector<std::string> summary_subtokens;

    void derive_subtokens();

    // Everything except id and timestamp; this is the identity used by
    // snapshot dedup and by synthetic clone injection.
    bool same_content(const Sample& other) const {
        return project == other.project && task == other.task && code == other.code &&
               summary == other.summary && name == other.name;
    }

    bool operator==(const Sample& other) const {
        return id == other.id && timestamp == other.timestamp && same_content(other);
    }
};

struct Corpus {
    std::vector<Sample> samples;
    std::set<std::string> projects;
    std::optional<Date> tau; // collection instant, when known

    // Validates id uniqueness, derives subtokens and the project set.
    static Corpus from_samples(std::vector<Sample> samples,
                               std::optional<Date> tau = std::nullopt);

    bool contains(const std::string& id) const { return index_.count(id) != 0; }
    const Sample& at(const std::string& id) const;
    std::size_t size() const { return samples.size(); }

    // All sample ids, ascending.
    std::vector<std::string> sorted_ids() const;

    bool operator==(const Corpus& other) const {
        return samples == other.samples && projects == other.projects;
    }

private:
    std::unordered_map<std::string, std::size_t> index_;
};

/// Ordered set of sample ids (kept sorted ascending) with a provenance tag.
struct SampleSet {
    std::vector<std::string> ids;
    std::string label;

    SampleSet() = default;
    SampleSet(std::vector<std::string> ids_, std::string label_);

    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
    bool contains(const std::string& id) const;

    SampleSet intersect(const SampleSet& other, std::string label_ = {}) const;
    SampleSet unite(const SampleSet& other, std::string label_ = {}) const;

    bool same_ids(const SampleSet& other) const { return ids == other.ids; }
};

// Canonical format: one JSON object per line with fields
// {"id","project","timestamp","code","summary","name"(optional),"task"}.
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string serialize_corpus(const Corpus& corpus);
Corpus parse_corpus(std::string_view text, const std::string& origin = "<string>");

// FNV-1a over the canonical serialization; recorded in split provenance.
std::string corpus_digest(const Corpus& corpus);

// Writes content to path via a temp file + rename.
void atomic_write(const std::filesystem::path& path, std::string_view content);

} // namespace cseval
