#include "cseval/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cseval/rng.hpp"
#include "cseval/subtoken.hpp"
#include "json.hpp"

namespace cseval {

using nlohmann::json;

std::string to_string(Task task) {
    return task == Task::CommentGeneration ? "comment_generation" : "method_naming";
}

Task task_from_string(std::string_view s) {
    if (s == "comment_generation") return Task::CommentGeneration;
    if (s == "method_naming") return Task::MethodNaming;
    throw std::runtime_error("unknown task '" + std::string(s) + "'");
}

void Sample::derive_subtokens() {
    code_subtokens = subtokenize(code);
    summary_subtokens = subtokenize(summary);
}

Corpus Corpus::from_samples(std::vector<Sample> samples_, std::optional<Date> tau_) {
    Corpus corpus;
    corpus.samples = std::move(samples_);
    corpus.tau = tau_;
    corpus.index_.reserve(corpus.samples.size());
    for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
        Sample& s = corpus.samples[i];
        s.derive_subtokens();
        if (!corpus.index_.emplace(s.id, i).second)
            throw std::runtime_error("duplicate id '" + s.id + "'");
        corpus.projects.insert(s.project);
    }
    return corpus;
}

const Sample& Corpus::at(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::runtime_error("unknown sample id '" + id + "'");
    return samples[it->second];
}

std::vector<std::string> Corpus::sorted_ids() const {
    std::vector<std::string> ids;
    ids.reserve(samples.size());
    for (const Sample& s : samples) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

SampleSet::SampleSet(std::vector<std::string> ids_, std::string label_)
    : ids(std::move(ids_)), label(std::move(label_)) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

bool SampleSet::contains(const std::string& id) const {
    return std::binary_search(ids.begin(), ids.end(), id);
}

SampleSet SampleSet::intersect(const SampleSet& other, std::string label_) const {
    SampleSet out;
    out.label = label_.empty() ? label : std::move(label_);
    std::set_intersection(ids.begin(), ids.end(), other.ids.begin(), other.ids.end(),
                          std::back_inserter(out.ids));
    return out;
}

SampleSet SampleSet::unite(const SampleSet& other, std::string label_) const {
    SampleSet out;
    out.label = label_.empty() ? label : std::move(label_);
    std::set_union(ids.begin(), ids.end(), other.ids.begin(), other.ids.end(),
                   std::back_inserter(out.ids));
    return out;
}

namespace {

json sample_to_json(const Sample& s) {
    json j;
    j["id"] = s.id;
    j["project"] = s.project;
    j["timestamp"] = s.timestamp.to_string();
    j["code"] = s.code;
    j["summary"] = s.summary;
    if (!s.name.empty()) j["name"] = s.name;
    j["task"] = to_string(s.task);
    return j;
}

std::string require_string(const json& j, const char* field, std::size_t line) {
    auto it = j.find(field);
    if (it == j.end())
        throw std::runtime_error("line " + std::to_string(line) + ": missing field '" +
                                 field + "'");
    if (!it->is_string())
        throw std::runtime_error("line " + std::to_string(line) + ": field '" + field +
                                 "' must be a string");
    return it->get<std::string>();
}

} // namespace

std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const Sample& s : corpus.samples) {
        out += sample_to_json(s).dump();
        out += '\n';
    }
    return out;
}

Corpus parse_corpus(std::string_view text, const std::string& origin) {
    std::vector<Sample> samples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        std::string_view line =
            end == std::string_view::npos ? text.substr(pos) : text.substr(pos, end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (line.empty()) continue;

        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(origin + ": line " + std::to_string(line_no) +
                                     ": malformed record: " + e.what());
        }
        try {
            Sample s;
            s.id = require_string(j, "id", line_no);
            s.project = require_string(j, "project", line_no);
            s.timestamp = Date::parse(require_string(j, "timestamp", line_no));
            s.code = require_string(j, "code", line_no);
            s.summary = require_string(j, "summary", line_no);
            if (j.contains("name")) s.name = require_string(j, "name", line_no);
            s.task = task_from_string(require_string(j, "task", line_no));
            samples.push_back(std::move(s));
        } catch (const std::runtime_error& e) {
            std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0) throw std::runtime_error(origin + ": " + msg);
            throw std::runtime_error(origin + ": line " + std::to_string(line_no) + ": " +
                                     msg);
        }
    }
    try {
        return Corpus::from_samples(std::move(samples));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_corpus(buf.str(), path.string());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    atomic_write(path, serialize_corpus(corpus));
}

std::string corpus_digest(const Corpus& corpus) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize_corpus(corpus))));
    return buf;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace cseval
