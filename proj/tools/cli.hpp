#pragma once

#include "plap/geometry.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace plap::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kNonConvergence = 3 };

/// Runs one command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// key = value document; '#' starts a comment. Duplicate keys are rejected.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Builds a model manifold from a key = value document. Relative table paths
/// resolve against base_dir.
ModelManifold parse_manifold(std::istream& in, const std::filesystem::path& base_dir = {});
ModelManifold load_manifold(const std::filesystem::path& file);

/// "%.12g" formatting shared by every CSV and console line.
std::string fmt(double x);

/// Output directory when --out is not given: $PLAP_OUT_DIR, else "plap-out".
std::filesystem::path default_output_dir();

/// Named CSV tables plus a JSON summary, written together.
class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    void add_table(std::string file, std::vector<std::string> header, std::vector<std::vector<std::string>> rows);
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, bool value);
    void set_pass(bool pass) { pass_ = pass_ && pass; }
    bool pass() const noexcept { return pass_; }
    bool empty() const noexcept { return tables_.empty(); }

    /// Writes <file>.csv for each table and <command>.json. Raises
    /// invalid-input, writing nothing, when there are no tables.
    void write(const std::filesystem::path& dir) const;

private:
    struct Table {
        std::string file;
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;
    };

    std::string command_;
    std::vector<Table> tables_;
    std::vector<std::pair<std::string, std::string>> fields_;   // key, JSON-encoded value
    bool pass_ = true;
};

}  // namespace plap::cli
