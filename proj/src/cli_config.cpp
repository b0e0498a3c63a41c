#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "liepnm/cli.hpp"
#include "liepnm/error.hpp"

namespace liepnm::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    std::size_t line;
};

[[noreturn]] void bad(const std::string& key, const Entry& e, const std::string& why) {
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " = '" + e.value + "': " + why);
}

double as_double(const std::string& key, const Entry& e) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) bad(key, e, "expected a number");
    if (!std::isfinite(v)) bad(key, e, "expected a finite number");
    return v;
}

std::uint64_t as_unsigned(const std::string& key, const Entry& e) {
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) bad(key, e, "expected a non-negative integer");
    return v;
}

bool as_bool(const std::string& key, const Entry& e) {
    static const std::set<std::string> yes{"true", "yes", "on", "1"};
    static const std::set<std::string> no{"false", "no", "off", "0"};
    if (yes.count(e.value)) return true;
    if (no.count(e.value)) return false;
    bad(key, e, "expected true or false");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    static const std::set<std::string> known{"family", "F",       "x0",     "xT",          "y0",
                                             "y0_prime", "n",     "N",      "r_max",       "samples",
                                             "burn_in", "seed",   "travel_time", "out_dir", "plot"};
    std::map<std::string, Entry> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!known.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (entries.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
        entries.emplace(key, Entry{value, line_no});
    }

    auto need = [&](const std::string& key) -> const Entry& {
        const auto it = entries.find(key);
        if (it == entries.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    };
    auto has = [&](const std::string& key) { return entries.count(key) > 0; };

    RunConfig rc;
    pipeline::SolveConfig& sc = rc.solve;
    const std::string family = need("family").value;
    charts::OdeFamily& fam = sc.family;
    if (family == "first_order") {
        fam.kind = charts::FamilyKind::FirstOrderHomogeneous;
        rc.F_text = need("F").value;
        fam.F = expr::parse(rc.F_text);
        fam.x0 = has("x0") ? as_double("x0", need("x0")) : 1.0;
        if (has("y0_prime")) bad("y0_prime", need("y0_prime"), "only used by the second_order family");
    } else if (family == "second_order") {
        fam.kind = charts::FamilyKind::SecondOrderExample;
        if (has("F")) bad("F", need("F"), "only used by the first_order family");
        fam.x0 = as_double("x0", need("x0"));
        fam.y0_prime = as_double("y0_prime", need("y0_prime"));
    } else {
        bad("family", need("family"), "expected first_order or second_order");
    }
    fam.x_T = as_double("xT", need("xT"));
    fam.y0 = as_double("y0", need("y0"));

    sc.n = as_unsigned("n", need("n"));
    if (has("N")) {
        sc.N = as_unsigned("N", need("N"));
        if (sc.N == 0) bad("N", need("N"), "must be positive");
    }
    sc.r_max = as_double("r_max", need("r_max"));
    if (has("samples")) sc.samples = as_unsigned("samples", need("samples"));
    if (has("burn_in")) sc.burn_in = as_unsigned("burn_in", need("burn_in"));
    if (has("seed")) sc.seed = as_unsigned("seed", need("seed"));
    if (has("travel_time")) sc.travel_time = as_double("travel_time", need("travel_time"));
    if (has("out_dir")) rc.out_dir = need("out_dir").value;
    if (has("plot")) rc.plot = as_bool("plot", need("plot"));

    sc.validate();
    return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig rc = parse_config(buf.str());
    if (rc.out_dir.is_relative()) rc.out_dir = path.parent_path() / rc.out_dir;
    return rc;
}

}  // namespace liepnm::cli
