#include "setsolve/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string/trim.hpp>

#include "setsolve/machine.hpp"
#include "setsolve/types.hpp"

namespace setsolve {

namespace fs = std::filesystem;

std::map<std::string, ManifestEntry> parse_manifest(const std::string& text)
{
    std::map<std::string, ManifestEntry> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        boost::algorithm::trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        auto eq = line.find(" = ");
        if (eq == std::string::npos)
            throw std::runtime_error("bad manifest line: " + line);
        std::string key = boost::algorithm::trim_copy(line.substr(0, eq));
        std::string rest = line.substr(eq + 3);
        ManifestEntry e;
        auto bar = rest.find(" | ");
        e.value = boost::algorithm::trim_copy(rest.substr(0, bar));
        if (bar != std::string::npos)
            e.origin = boost::algorithm::trim_copy(rest.substr(bar + 3));
        out[key] = e;
    }
    return out;
}

namespace {

std::string read_text(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<CorpusCase> load_corpus(const std::string& dir)
{
    std::map<std::string, ManifestEntry> manifest;
    fs::path mpath = fs::path(dir) / "manifest.txt";
    if (fs::exists(mpath))
        manifest = parse_manifest(read_text(mpath));
    fs::path golden_dir = fs::path(dir) / "golden";
    std::vector<CorpusCase> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string ext = entry.path().extension().string();
        if (!entry.is_regular_file() || (ext != ".smch" && ext != ".slog"))
            continue;
        CorpusCase c;
        c.file = entry.path().filename().string();
        c.path = entry.path().string();
        c.machine = ext == ".smch";
        std::vector<TypeError> errs;
        try {
            if (c.machine)
                errs = typecheck_machine(load_machine(c.path));
            else
                errs = typecheck_program(load_program(c.path)).errors;
        } catch (const std::exception& e) {
            throw std::runtime_error(c.file + ": " + e.what());
        }
        if (!errs.empty())
            throw std::runtime_error(c.file + ": " + errs.front().message);
        std::string prefix = c.file + ".";
        for (const auto& [k, v] : manifest)
            if (k.rfind(prefix, 0) == 0)
                c.expected[k.substr(prefix.size())] = v;
        if (fs::exists(golden_dir))
            for (const auto& g : fs::directory_iterator(golden_dir)) {
                std::string name = g.path().filename().string();
                if (name.rfind(prefix, 0) == 0 && g.path().extension() == ".txt")
                    c.golden[g.path().stem().string().substr(prefix.size())] = read_text(g.path());
            }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const CorpusCase& a, const CorpusCase& b) { return a.file < b.file; });
    return out;
}

}  // namespace setsolve
