#include "cseval/miner.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cseval/ingest.hpp"

namespace fs = std::filesystem;

namespace cseval {

void MinerConfig::validate() const {
    if (repo_paths.empty()) throw std::runtime_error("miner needs at least one repo path");
    if (cutoffs.empty()) throw std::runtime_error("miner needs at least one cutoff");
    for (std::size_t i = 1; i < cutoffs.size(); ++i)
        if (!(cutoffs[i - 1] < cutoffs[i]))
            throw std::runtime_error("cutoffs must be strictly increasing");
}

namespace {

std::string shell_quote(const std::string& arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_command(const std::string& cmd) {
    CommandResult result;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot spawn command: " + cmd);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = status == -1 ? -1 : WEXITSTATUS(status);
    return result;
}

std::string git_in(const std::string& repo, const std::string& args) {
    return "git -C " + shell_quote(repo) + " " + args;
}

} // namespace

std::optional<std::string> snapshot(const std::string& repo_dir, Date cutoff) {
    // Commit times over all local branches; the working tree may be left
    // detached by a previous snapshot, so HEAD is not used.
    CommandResult log = run_command(git_in(repo_dir, "log --branches --pretty=format:'%H %ct'"));
    if (log.exit_code != 0)
        throw std::runtime_error("'" + repo_dir + "' is not a usable git repository");

    const long long bound = cutoff.epoch_seconds();
    std::string best_sha;
    long long best_time = -1;
    std::istringstream lines(log.output);
    std::string line;
    while (std::getline(lines, line)) {
        std::size_t space = line.find(' ');
        if (space == std::string::npos) continue;
        long long commit_time = std::stoll(line.substr(space + 1));
        if (commit_time < bound && commit_time > best_time) {
            best_time = commit_time;
            best_sha = line.substr(0, space);
        }
    }
    if (best_sha.empty()) return std::nullopt; // empty snapshot

    CommandResult checkout =
        run_command(git_in(repo_dir, "checkout --quiet --force " + best_sha));
    if (checkout.exit_code != 0)
        throw std::runtime_error("cannot check out " + best_sha + " in '" + repo_dir + "'");
    return best_sha;
}

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool contains_word(const std::string& text, const std::string& word) {
    std::size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_ident_char(text[pos - 1]);
        std::size_t after = pos + word.size();
        bool right_ok = after >= text.size() || !is_ident_char(text[after]);
        if (left_ok && right_ok) return true;
        pos = after;
    }
    return false;
}

// Balanced-brace scan starting at an opening brace; honors strings, chars
// and comments. Returns the index just past the matching close brace, or
// npos when unbalanced.
std::size_t skip_braces(const std::string& text, std::size_t open) {
    int depth = 0;
    std::size_t i = open;
    while (i < text.size()) {
        char c = text[i];
        if (c == '"' || c == '\'') {
            char quote = c;
            ++i;
            while (i < text.size() && text[i] != quote) {
                if (text[i] == '\\') ++i;
                ++i;
            }
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            i = text.find('\n', i);
            if (i == std::string::npos) return std::string::npos;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            i = text.find("*/", i + 2);
            if (i == std::string::npos) return std::string::npos;
            i += 2;
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}') {
            if (--depth == 0) return i + 1;
        }
        ++i;
    }
    return std::string::npos;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string doc_first_sentence(const std::string& doc_block) {
    // Drop the comment delimiters and the leading '*' margins.
    std::string body = doc_block;
    if (body.rfind("/**", 0) == 0) body = body.substr(3);
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, "*/") == 0)
        body = body.substr(0, body.size() - 2);
    std::string flat;
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
        std::size_t b = line.find_first_not_of(" \t");
        if (b != std::string::npos && line[b] == '*') ++b;
        line = b == std::string::npos ? std::string() : trim(line.substr(b));
        if (line.empty()) continue;
        if (!flat.empty()) flat += ' ';
        flat += line;
    }
    std::string cleaned = strip_doc_tags(flat);
    for (std::size_t i = 0; i < cleaned.size(); ++i) {
        if (cleaned[i] != '.') continue;
        if (i + 1 == cleaned.size() ||
            std::isspace(static_cast<unsigned char>(cleaned[i + 1])))
            return trim(cleaned.substr(0, i));
    }
    return trim(cleaned);
}

std::vector<Sample> extract_methods_from_source(const std::string& source,
                                                const std::string& project,
                                                const std::string& rel_path, Date cutoff) {
    std::vector<Sample> samples;
    std::size_t i = 0;
    enum { Code, Line, Block, Str, Chr } state = Code;
    std::size_t line_no = 1;

    while (i < source.size()) {
        char c = source[i];
        if (c == '\n') ++line_no;
        switch (state) {
            case Line:
                if (c == '\n') state = Code;
                ++i;
                continue;
            case Block:
                if (c == '*' && i + 1 < source.size() && source[i + 1] == '/') {
                    state = Code;
                    i += 2;
                    continue;
                }
                ++i;
                continue;
            case Str:
            case Chr: {
                char quote = state == Str ? '"' : '\'';
                if (c == '\\')
                    i += 2;
                else {
                    if (c == quote) state = Code;
                    ++i;
                }
                continue;
            }
            case Code: break;
        }
        if (c == '"') {
            state = Str;
            ++i;
            continue;
        }
        if (c == '\'') {
            state = Chr;
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
            state = Line;
            i += 2;
            continue;
        }
        if (c == '/' && i + 2 < source.size() && source[i + 1] == '*' &&
            source[i + 2] == '*' && (i + 3 >= source.size() || source[i + 3] != '/')) {
            // Doc block.
            std::size_t doc_end = source.find("*/", i + 3);
            if (doc_end == std::string::npos) break;
            std::string doc = source.substr(i, doc_end + 2 - i);
            std::size_t doc_line = line_no;
            for (std::size_t k = i; k < doc_end + 2; ++k)
                if (source[k] == '\n') ++line_no;
            i = doc_end + 2;

            // Skip whitespace and annotations between the doc and the
            // declaration it documents.
            std::size_t p = i;
            for (;;) {
                while (p < source.size() &&
                       std::isspace(static_cast<unsigned char>(source[p])))
                    ++p;
                if (p < source.size() && source[p] == '@') {
                    ++p;
                    while (p < source.size() && is_ident_char(source[p])) ++p;
                    while (p < source.size() &&
                           std::isspace(static_cast<unsigned char>(source[p])))
                        ++p;
                    if (p < source.size() && source[p] == '(') {
                        int depth = 0;
                        while (p < source.size()) {
                            if (source[p] == '(') ++depth;
                            if (source[p] == ')' && --depth == 0) {
                                ++p;
                                break;
                            }
                            ++p;
                        }
                    }
                    continue;
                }
                break;
            }

            // Signature: up to '{' or ';' at paren depth 0.
            std::size_t sig_begin = p;
            int paren = 0;
            std::size_t sig_end = std::string::npos;
            char terminator = 0;
            for (std::size_t q = p; q < source.size() && q < p + 4000; ++q) {
                char sc = source[q];
                if (sc == '(') ++paren;
                if (sc == ')') --paren;
                if (sc == '/' && q + 1 < source.size() &&
                    (source[q + 1] == '/' || source[q + 1] == '*'))
                    break; // another comment: not a plain signature
                if (paren == 0 && (sc == '{' || sc == ';')) {
                    sig_end = q;
                    terminator = sc;
                    break;
                }
            }
            if (sig_end == std::string::npos) continue;
            std::string signature = source.substr(sig_begin, sig_end - sig_begin);

            std::size_t open_paren = signature.find('(');
            if (open_paren == std::string::npos) continue;
            std::string head = signature.substr(0, open_paren);
            if (head.find('=') != std::string::npos) continue;
            if (contains_word(head, "class") || contains_word(head, "interface") ||
                contains_word(head, "enum") || contains_word(head, "record"))
                continue;
            std::size_t name_end = open_paren;
            while (name_end > 0 &&
                   std::isspace(static_cast<unsigned char>(signature[name_end - 1])))
                --name_end;
            std::size_t name_begin = name_end;
            while (name_begin > 0 && is_ident_char(signature[name_begin - 1])) --name_begin;
            std::string name = signature.substr(name_begin, name_end - name_begin);
            if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])))
                continue;

            std::string code;
            std::size_t resume;
            if (terminator == ';') {
                code = trim(signature) + ";";
                resume = sig_end + 1;
            } else {
                std::size_t body_end = skip_braces(source, sig_end);
                if (body_end == std::string::npos) continue;
                code = trim(source.substr(sig_begin, body_end - sig_begin));
                resume = body_end;
            }

            Sample sample;
            sample.project = project;
            sample.timestamp = cutoff;
            sample.code = std::move(code);
            sample.summary = doc_first_sentence(doc);
            sample.name = name;
            sample.task = Task::CommentGeneration;
            // Line number for readability, byte offset for uniqueness.
            sample.id = project + ":" + cutoff.to_string() + ":" + rel_path + ":" +
                        std::to_string(doc_line) + ":" + std::to_string(sig_begin);
            samples.push_back(std::move(sample));

            for (std::size_t k = i; k < resume && k < source.size(); ++k)
                if (source[k] == '\n') ++line_no;
            i = resume;
            continue;
        }
        ++i;
    }
    return samples;
}

std::vector<Sample> extract_methods(const std::string& snapshot_dir,
                                    const std::string& project, Date cutoff,
                                    std::size_t* skipped_files) {
    std::vector<std::string> files;
    for (auto it = fs::recursive_directory_iterator(
             snapshot_dir, fs::directory_options::skip_permission_denied);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_directory() && it->path().filename() == ".git") {
            it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file() && it->path().extension() == ".java")
            files.push_back(fs::relative(it->path(), snapshot_dir).generic_string());
    }
    std::sort(files.begin(), files.end());

    std::vector<Sample> samples;
    std::size_t skipped = 0;
    for (const std::string& rel : files) {
        std::ifstream in(fs::path(snapshot_dir) / rel, std::ios::binary);
        if (!in) {
            ++skipped;
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        auto extracted = extract_methods_from_source(buf.str(), project, rel, cutoff);
        samples.insert(samples.end(), extracted.begin(), extracted.end());
    }
    if (skipped_files) *skipped_files = skipped;
    return samples;
}

std::vector<Sample> dedup_across_snapshots(std::vector<Sample> samples) {
    auto content_key = [](const Sample& s) {
        return s.project + '\x1e' + to_string(s.task) + '\x1e' + s.code + '\x1e' +
               s.summary + '\x1e' + s.name;
    };
    std::sort(samples.begin(), samples.end(), [&](const Sample& a, const Sample& b) {
        std::string ka = content_key(a), kb = content_key(b);
        if (ka != kb) return ka < kb;
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.id < b.id;
    });
    std::vector<Sample> kept;
    std::string prev_key;
    for (Sample& s : samples) {
        std::string key = content_key(s);
        if (kept.empty() || key != prev_key) {
            kept.push_back(std::move(s));
            prev_key = std::move(key);
        }
    }
    std::sort(kept.begin(), kept.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });
    return kept;
}

Corpus mine(const MinerConfig& cfg) {
    cfg.validate();
    std::vector<Sample> all;
    for (const std::string& repo : cfg.repo_paths) {
        std::string project = fs::path(repo).filename().string();
        if (project.empty()) project = repo;

        CommandResult head = run_command(git_in(repo, "rev-parse --abbrev-ref HEAD"));
        std::string original_ref = trim(head.output);

        for (Date cutoff : cfg.cutoffs) {
            std::optional<std::string> commit = snapshot(repo, cutoff);
            if (!commit) {
                std::cerr << "note: " << project << " has no commit before "
                          << cutoff.to_string() << ", skipped\n";
                continue;
            }
            std::size_t skipped = 0;
            auto samples = extract_methods(repo, project, cutoff, &skipped);
            if (skipped)
                std::cerr << "warning: " << project << "@" << cutoff.to_string() << ": "
                          << skipped << " unreadable files skipped\n";
            all.insert(all.end(), samples.begin(), samples.end());
        }
        if (!original_ref.empty() && original_ref != "HEAD")
            run_command(git_in(repo, "checkout --quiet --force " + original_ref));
    }
    std::vector<Sample> deduped = dedup_across_snapshots(std::move(all));
    std::optional<Date> tau;
    if (!cfg.cutoffs.empty()) tau = cfg.cutoffs.back();
    return Corpus::from_samples(std::move(deduped), tau);
}

} // namespace cseval
