#pragma once

#include <map>
#include <string>
#include <vector>

namespace setsolve {

struct ManifestEntry {
    std::string value;
    std::string origin;
};

/// One corpus file with the expectations recorded for it in the manifest.
struct CorpusCase {
    std::string file;  // relative to the corpus directory
    std::string path;
    bool machine = false;
    std::map<std::string, ManifestEntry> expected;  // key without the file prefix
    /// Expected CLI output per subcommand, from golden/<file>.<command>.txt.
    std::map<std::string, std::string> golden;
};

/// `key = value | origin` lines; `#` comments.
std::map<std::string, ManifestEntry> parse_manifest(const std::string& text);

/// Loads every .smch/.slog file of `dir` (mutations excluded), checks that
/// it parses and typechecks, and attaches the manifest expectations.
/// Throws std::runtime_error naming the first failing file.
std::vector<CorpusCase> load_corpus(const std::string& dir);

}  // namespace setsolve
