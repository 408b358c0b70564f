#include "cli.hpp"

#include "plap/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace plap::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& tok, const std::string& key) {
    std::string t = tok;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
    if (t == "-inf" || t == "-infinity") return -kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    require(used == tok.size() && used > 0, ErrorKind::InvalidInput, "'" + key + "': not a number: " + tok);
    return v;
}

std::vector<double> numbers(const std::string& value, const std::string& key) {
    std::istringstream ss(value);
    std::vector<double> out;
    for (std::string tok; ss >> tok;) out.push_back(to_number(tok, key));
    return out;
}

int to_int(const std::string& value, const std::string& key) {
    const double v = to_number(trim(value), key);
    require(v == static_cast<int>(v), ErrorKind::InvalidInput, "'" + key + "' must be an integer");
    return static_cast<int>(v);
}

TailLaw parse_tail(const std::string& value, const std::string& key) {
    std::istringstream ss(value);
    std::string kind, rate;
    ss >> kind >> rate;
    require(!rate.empty(), ErrorKind::InvalidInput, "'" + key + "' expects '<power|exponential> <rate>'");
    TailLaw law;
    if (kind == "power")
        law.kind = TailLaw::Kind::Power;
    else if (kind == "exponential")
        law.kind = TailLaw::Kind::Exponential;
    else
        fail(ErrorKind::InvalidInput, "'" + key + "': unknown tail law " + kind);
    law.rate = to_number(rate, key);
    return law;
}

TabulatedWarp read_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    require(in.good(), ErrorKind::InvalidInput, "cannot open warp table " + file.string());
    TabulatedWarp w;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        const auto v = numbers(line, file.string());
        require(v.size() == 2, ErrorKind::InvalidInput, "warp table rows need two columns: t eta");
        w.t.push_back(v[0]);
        w.eta.push_back(v[1]);
    }
    return w;
}

WarpFunction parse_warp(const std::map<std::string, std::string>& kv, const std::filesystem::path& base_dir) {
    const auto it = kv.find("warp.kind");
    require(it != kv.end(), ErrorKind::InvalidInput, "warped manifold needs warp.kind");
    const std::string& kind = it->second;
    const auto pit = kv.find("warp.params");
    const std::string params = pit == kv.end() ? std::string{} : pit->second;

    if (kind == "tabulated") {
        require(!params.empty(), ErrorKind::InvalidInput, "tabulated warp needs warp.params = <table file>");
        std::filesystem::path file = params;
        if (file.is_relative()) file = base_dir / file;
        auto w = read_table(file);
        if (auto t = kv.find("warp.lower_tail"); t != kv.end()) w.lower_tail = parse_tail(t->second, t->first);
        if (auto t = kv.find("warp.upper_tail"); t != kv.end()) w.upper_tail = parse_tail(t->second, t->first);
        return WarpFunction(std::move(w));
    }
    require(!kv.contains("warp.lower_tail") && !kv.contains("warp.upper_tail"), ErrorKind::InvalidInput,
            "tail laws apply to tabulated warps only");
    const auto v = numbers(params, "warp.params");
    auto need = [&](std::size_t lo, std::size_t hi) {
        require(v.size() >= lo && v.size() <= hi, ErrorKind::InvalidInput,
                "warp.params: wrong number of values for " + kind);
    };
    if (kind == "power") {
        need(1, 2);
        return WarpFunction(PowerWarp{v[0], v.size() > 1 ? v[1] : 0.0});
    }
    if (kind == "exponential") {
        need(1, 1);
        return WarpFunction(ExponentialWarp{v[0]});
    }
    if (kind == "cosh") {
        need(0, 0);
        return WarpFunction(CoshWarp{});
    }
    if (kind == "polyeven") {
        need(1, 1);
        return WarpFunction(PolyEvenWarp{v[0]});
    }
    fail(ErrorKind::InvalidInput, "unknown warp.kind: " + kind);
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::InvalidInput,
                "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        require(!key.empty(), ErrorKind::InvalidInput, "line " + std::to_string(lineno) + ": empty key");
        require(!kv.contains(key), ErrorKind::InvalidInput, "duplicate key " + key);
        kv.emplace(std::move(key), trim(line.substr(eq + 1)));
    }
    return kv;
}

ModelManifold parse_manifold(std::istream& in, const std::filesystem::path& base_dir) {
    const auto kv = parse_key_values(in);
    static const char* known[] = {"variant",         "m",          "warp.kind", "warp.params", "warp.lower_tail",
                                  "warp.upper_tail", "domain",     "ricci_N_lower"};
    for (const auto& [k, _] : kv)
        require(std::find(std::begin(known), std::end(known), k) != std::end(known), ErrorKind::InvalidInput,
                "unknown key " + k);
    const auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    const std::string* variant = get("variant");
    require(variant != nullptr, ErrorKind::InvalidInput, "missing key: variant");
    const std::string* mstr = get("m");
    require(mstr != nullptr, ErrorKind::InvalidInput, "missing key: m");
    const int m = to_int(*mstr, "m");

    std::optional<Interval> domain;
    if (const auto* d = get("domain")) {
        const auto v = numbers(*d, "domain");
        require(v.size() == 2 && v[0] < v[1], ErrorKind::InvalidInput, "domain expects two increasing bounds");
        domain = Interval{v[0], v[1]};
    }

    if (*variant == "euclidean") {
        require(!get("warp.kind") && !get("ricci_N_lower"), ErrorKind::InvalidInput,
                "warp keys apply to warped manifolds only");
        const Interval d = domain.value_or(Interval{0.0, kInf});
        return ModelManifold::radial_euclidean(m, d.lo, d.hi);
    }
    require(*variant == "warped", ErrorKind::InvalidInput, "variant must be euclidean or warped");
    const double ricci = get("ricci_N_lower") ? to_number(*get("ricci_N_lower"), "ricci_N_lower") : 0.0;
    return ModelManifold::warped_product(m, parse_warp(kv, base_dir), domain.value_or(Interval{}), ricci);
}

ModelManifold load_manifold(const std::filesystem::path& file) {
    std::ifstream in(file);
    require(in.good(), ErrorKind::InvalidInput, "cannot open manifold file " + file.string());
    return parse_manifold(in, file.parent_path());
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("PLAP_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "plap-out";
}

void Report::add_table(std::string file, std::vector<std::string> header, std::vector<std::vector<std::string>> rows) {
    for (const auto& r : rows)
        require(r.size() == header.size(), ErrorKind::InternalInconsistency, "row width mismatch in " + file);
    tables_.push_back({std::move(file), std::move(header), std::move(rows)});
}

void Report::set(const std::string& key, const std::string& value) {
    fields_.emplace_back(key, nlohmann::json(value).dump());
}

// Numbers go through the same 12-digit formatting as the CSVs so summaries
// are byte-stable too. Non-finite values become strings.
void Report::set(const std::string& key, double value) {
    fields_.emplace_back(key, std::isfinite(value) ? fmt(value) : nlohmann::json(fmt(value)).dump());
}

void Report::set(const std::string& key, bool value) { fields_.emplace_back(key, value ? "true" : "false"); }

void Report::write(const std::filesystem::path& dir) const {
    require(!tables_.empty(), ErrorKind::InvalidInput, "no results to write");
    std::filesystem::create_directories(dir);
    for (const auto& t : tables_) {
        std::ofstream out(dir / (t.file + ".csv"), std::ios::binary);
        for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << csv_cell(t.header[i]);
        out << '\n';
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
            out << '\n';
        }
        require(out.good(), ErrorKind::InvalidInput, "cannot write " + (dir / (t.file + ".csv")).string());
    }
    // Built by hand so key order is insertion order.
    std::ofstream out(dir / (command_ + ".json"), std::ios::binary);
    out << "{\n  \"command\": " << nlohmann::json(command_).dump() << ",\n  \"pass\": " << (pass_ ? "true" : "false");
    for (const auto& [k, v] : fields_) out << ",\n  " << nlohmann::json(k).dump() << ": " << v;
    out << ",\n  \"files\": [";
    for (std::size_t i = 0; i < tables_.size(); ++i)
        out << (i ? ", " : "") << nlohmann::json(tables_[i].file + ".csv").dump();
    out << "]\n}\n";
}

}  // namespace plap::cli
