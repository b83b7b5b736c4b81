#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cseval/corpus.hpp"

namespace cseval {

struct MinerConfig {
    std::vector<std::string> repo_paths;
    std::vector<Date> cutoffs; // strictly increasing
    std::string extractor = "brace";

    void validate() const;
};

/// Newest commit strictly before the cutoff (commit time), checked out into
/// the working tree. Returns nothing when the repository has no commit
/// before the cutoff (the repo is skipped for that cutoff).
std::optional<std::string> snapshot(const std::string& repo_dir, Date cutoff);

/// Scans .java files under a checked-out tree with a brace-matching
/// extractor: a /** doc block */ immediately preceding a method signature
/// yields one sample whose summary is the doc's first sentence and whose
/// timestamp is the cutoff. Not a parser; annotations are skipped, bodies
/// are matched by balanced braces.
std::vector<Sample> extract_methods(const std::string& snapshot_dir,
                                    const std::string& project, Date cutoff,
                                    std::size_t* skipped_files = nullptr);

// Extraction on in-memory source, for tests and reuse.
std::vector<Sample> extract_methods_from_source(const std::string& source,
                                                const std::string& project,
                                                const std::string& rel_path, Date cutoff);

/// Samples identical in everything but timestamp collapse to the earliest
/// one. Output is sorted by id; idempotent and order-independent.
std::vector<Sample> dedup_across_snapshots(std::vector<Sample> samples);

/// Full mining loop: snapshot every repo at every cutoff, extract, dedup.
Corpus mine(const MinerConfig& cfg);

// First sentence of a doc comment: margins and doc tags stripped, text up
// to the first period followed by whitespace or end.
std::string doc_first_sentence(const std::string& doc_block);

} // namespace cseval
