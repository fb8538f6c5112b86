#include "nlw/config.hpp"

#include "nlw/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

namespace nlw {

namespace {

ConfigKey real_key(std::string key, std::string def, std::string help) {
    return {std::move(key), std::move(def), KeyType::Real, {}, std::move(help)};
}
ConfigKey int_key(std::string key, std::string def, std::string help) {
    return {std::move(key), std::move(def), KeyType::Integer, {}, std::move(help)};
}
ConfigKey list_key(std::string key, std::string def, std::string help) {
    return {std::move(key), std::move(def), KeyType::RealList, {}, std::move(help)};
}
ConfigKey word_key(std::string key, std::string def, std::vector<std::string> choices, std::string help) {
    return {std::move(key), std::move(def), KeyType::Word, std::move(choices), std::move(help)};
}

std::vector<ConfigKey> build_schema() {
    return {
        int_key("grid.nx", "33", "nodes in x"),
        int_key("grid.ny", "33", "nodes in y"),
        int_key("grid.nt", "161", "time levels"),
        real_key("grid.Lx", "1", "length of Omega in x"),
        real_key("grid.Ly", "1", "length of Omega in y"),
        real_key("grid.T", "2.5", "final time"),
        real_key("grid.cfl_safety", "0.9", "fraction of the stability bound the time step may use"),

        real_key("medium.b_t", "0.3", "amplitude of the t component of b"),
        real_key("medium.b_x", "0.2", "amplitude of the x component of b"),
        real_key("medium.b_y", "-0.15", "amplitude of the y component of b"),
        real_key("medium.cx", "0.5", "centre of the b bump in x"),
        real_key("medium.cy", "0.5", "centre of the b bump in y"),
        real_key("medium.radius", "0.4", "radius of the b bump"),
        real_key("medium.t_on", "0.25", "b vanishes before this time"),
        real_key("medium.t_off", "2.25", "b vanishes after this time"),
        real_key("medium.r_amp", "0", "amplitude of the cubic remainder, 0 for none"),
        real_key("medium.validity_radius", "1000", "largest |q| at which the cubic remainder may be evaluated"),

        real_key("medium2.b_t", "0", "second medium: amplitude of the t component of b"),
        real_key("medium2.b_x", "0", "second medium: amplitude of the x component of b"),
        real_key("medium2.b_y", "0", "second medium: amplitude of the y component of b"),
        real_key("medium2.r_amp", "0", "second medium: cubic remainder amplitude"),

        real_key("data.phi_amp", "0.05", "initial displacement amplitude"),
        real_key("data.phi_cx", "0.4", "initial displacement centre x"),
        real_key("data.phi_cy", "0.55", "initial displacement centre y"),
        real_key("data.phi_radius", "0.3", "initial displacement radius"),
        real_key("data.psi_amp", "0", "initial velocity amplitude"),
        real_key("data.f_amp", "0.03", "boundary pulse amplitude"),
        real_key("data.f_freq", "1", "boundary pulse frequency"),
        real_key("data.t_quiet", "0.1", "boundary data vanish before this time"),
        real_key("data.t_ramp", "0.6", "boundary ramp duration"),
        int_key("data.variant", "0", "independent data set index"),

        word_key("solver.scheme", "picard", {"picard", "lagged"}, "nonlinear time stepping"),
        real_key("solver.eps_max", "0.1", "largest accepted data amplitude"),
        int_key("solver.max_iter", "30", "Picard iteration cap"),
        real_key("solver.tol", "1e-13", "Picard tolerance"),
        real_key("solver.blowup_factor", "1000", "abort when max|u| exceeds this multiple of the data scale"),

        real_key("forward.eps", "0.02", "data amplitude of the forward run"),

        list_key("expand.eps_list", "0.08,0.04,0.02,0.01", "decreasing amplitudes of the expansion sweep"),
        real_key("expand.floor_factor", "10", "rows below this multiple of the b = 0 floor are not fitted"),
        real_key("expand.cubic_amp", "2", "remainder amplitude of the second sweep, 0 to skip it"),

        list_key("iomap.eps_list", "0.08,0.04,0.02,0.01", "decreasing amplitudes of the defect sweep"),
        real_key("iomap.extract_eps", "0.04", "amplitude of the second-order extraction"),

        int_key("identity.probes", "10", "number of probes w"),
        real_key("identity.go_h", "0.4", "semiclassical parameter of the probes"),
        real_key("identity.go_radius", "0.3", "profile radius of the probes"),

        real_key("probes.lambda", "16", "WKB frequency"),
        int_key("probes.order", "2", "WKB amplitude order"),
        real_key("probes.go_h", "0.2", "GO semiclassical parameter"),
        real_key("probes.go_radius", "0.25", "GO profile radius"),
        real_key("probes.condition_cap", "1e6", "mask threshold for the gradient matrix condition number"),

        real_key("lightray.angle", "0.3", "ray direction angle"),
        int_key("lightray.n_omega", "8", "directions of the sampled ray data"),
        int_key("lightray.n_base", "17", "base points per axis of the sampled ray data"),
        list_key("lightray.h_list", "0.2,0.1,0.05", "semiclassical parameters of the concentration run"),
        real_key("lightray.tube_radius", "0.25", "profile radius of the concentration run"),

        real_key("recover.wkb_lambda", "4", "WKB frequency of the pointwise probes"),
        int_key("recover.wkb_order", "2", "WKB amplitude order"),
        int_key("recover.wkb_directions", "6", "3: reference triple, 6: triple and negatives"),
        int_key("recover.go_directions", "8", "directions of the GO battery"),
        real_key("recover.go_h", "0.25", "semiclassical parameter of the battery"),
        real_key("recover.go_radius", "0.3", "profile radius of the battery"),
        real_key("recover.go_spacing", "0.125", "lattice spacing of the battery centres"),
        int_key("recover.space_factor", "4", "recovery grid coarsening in space"),
        int_key("recover.time_factor", "4", "recovery grid coarsening in time"),
        real_key("recover.ridge", "3e-4", "ridge parameter relative to the largest squared singular value"),
        real_key("recover.condition_cap", "1e6", "mask threshold of the pointwise solve"),
        word_key("recover.pairing", "scheme", {"scheme", "continuum"}, "boundary pairing rule"),
        real_key("recover.noise", "0", "relative Gaussian noise on the identity values"),
        int_key("recover.seed", "1", "noise seed"),
        int_key("recover.extraction_data", "2", "smooth data sets of the extraction check"),
        real_key("recover.extraction_eps", "0.02", "amplitude of the extraction check"),

        list_key("report.criteria", "1,2,3,4,5,6,7,8", "acceptance criteria evaluated by report"),
    };
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Shortest text that parses back to the same double.
std::string shortest(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_real(const std::string& key, const std::string& text) {
    double v = 0;
    auto s = trim(text);
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError("config key '" + key + "': '" + text + "' is not a finite real number");
    return v;
}

long parse_int(const std::string& key, const std::string& text) {
    long v = 0;
    auto s = trim(text);
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("config key '" + key + "': '" + text + "' is not an integer");
    return v;
}

const ConfigKey* find_key(const std::string& key) {
    for (const auto& k : config_schema())
        if (k.key == key) return &k;
    return nullptr;
}

std::string bare(const std::string& key) {
    auto p = key.rfind('.');
    return p == std::string::npos ? key : key.substr(p + 1);
}

std::string section_of(const std::string& key) {
    auto p = key.rfind('.');
    return p == std::string::npos ? std::string() : key.substr(0, p);
}

[[noreturn]] void unknown_key(const std::string& key) {
    std::string msg = "unknown config key '" + key + "'";
    auto s = suggest_key(key);
    if (!s.empty()) msg += "; did you mean '" + bare(s) + "' in [" + section_of(s) + "]?";
    msg += "\nvalid keys:";
    std::string sec = section_of(key);
    bool any = false;
    for (const auto& k : config_schema())
        if (section_of(k.key) == sec) {
            msg += " " + k.key;
            any = true;
        }
    if (!any)
        for (const auto& k : config_schema()) msg += " " + k.key;
    throw ConfigError(msg);
}

std::string canonical_value(const ConfigKey& k, const std::string& value) {
    switch (k.type) {
    case KeyType::Integer:
        return std::to_string(parse_int(k.key, value));
    case KeyType::Real:
        return shortest(parse_real(k.key, value));
    case KeyType::RealList: {
        std::string out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!out.empty()) out += ",";
            out += shortest(parse_real(k.key, item));
        }
        if (out.empty()) throw ConfigError("config key '" + k.key + "' needs at least one value");
        return out;
    }
    case KeyType::Word: {
        auto w = trim(value);
        if (std::find(k.choices.begin(), k.choices.end(), w) == k.choices.end()) {
            std::string msg = "config key '" + k.key + "': '" + w + "' is not one of";
            for (const auto& c : k.choices) msg += " " + c;
            throw ConfigError(msg);
        }
        return w;
    }
    }
    return value;
}

} // namespace

const std::vector<ConfigKey>& config_schema() {
    static const std::vector<ConfigKey> schema = build_schema();
    return schema;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string suggest_key(const std::string& unknown) {
    const std::string name = bare(unknown), sec = section_of(unknown);
    auto prefix = [](const std::string& a, const std::string& b) {
        std::size_t n = 0;
        while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
        return n;
    };
    // Rank by edit distance less the shared prefix, then distance, then length.
    // Keys of the named section are compared by bare name and come first.
    std::string best;
    std::tuple<int, int, std::size_t, std::size_t> best_score{1 << 30, 0, 0, 0};
    for (const auto& k : config_schema()) {
        bool same = !sec.empty() && section_of(k.key) == sec;
        const std::string a = same || sec.empty() ? name : unknown;
        const std::string b = same || sec.empty() ? bare(k.key) : k.key;
        int d = int(edit_distance(a, b));
        std::tuple<int, int, std::size_t, std::size_t> score{same ? 0 : 1, d - int(prefix(a, b)), std::size_t(d), b.size()};
        if (score < best_score) {
            best_score = score;
            best = k.key;
        }
    }
    if (best.empty() || 2 * std::get<1>(best_score) > int(name.size())) return {};
    return best;
}

Config::Config() {
    for (const auto& k : config_schema()) values_[k.key] = canonical_value(k, k.default_value);
}

Config Config::from_string(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    Config c;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            c.set(name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) {
            if (!leaf.empty()) throw ConfigError("config key '" + name + "." + key + "' is nested too deeply");
            c.set(name + "." + key, leaf.data());
        }
    }
    return c;
}

Config Config::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
    const auto* k = find_key(key);
    if (!k) unknown_key(key);
    // Inline comments after the value.
    auto v = value;
    auto c = v.find_first_of("#;");
    if (c != std::string::npos) v = v.substr(0, c);
    values_[key] = canonical_value(*k, v);
}

void Config::apply_override(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

const std::string& Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) unknown_key(key);
    return it->second;
}

double Config::real(const std::string& key) const { return parse_real(key, raw(key)); }

long Config::integer(const std::string& key) const { return parse_int(key, raw(key)); }

std::size_t Config::count(const std::string& key) const {
    long v = integer(key);
    if (v < 0) throw ConfigError("config key '" + key + "' must not be negative");
    return static_cast<std::size_t>(v);
}

std::vector<double> Config::real_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    return out;
}

const std::string& Config::word(const std::string& key) const { return raw(key); }

std::string Config::canonical() const {
    std::string out, section;
    for (const auto& k : config_schema()) {
        auto sec = section_of(k.key);
        if (sec != section) {
            if (!out.empty()) out += "\n";
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += bare(k.key) + " = " + values_.at(k.key) + "\n";
    }
    return out;
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string Config::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

void Config::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    std::size_t nx = count("grid.nx"), ny = count("grid.ny"), nt = count("grid.nt");
    if (nx < 5 || ny < 5 || nt < 5) fail("grid needs at least 5 nodes per axis");
    if (real("grid.Lx") <= 0 || real("grid.Ly") <= 0 || real("grid.T") <= 0) fail("grid extents must be positive");
    double h = std::max(real("grid.Lx") / double(nx - 1), real("grid.Ly") / double(ny - 1));
    for (const char* key : {"probes.lambda", "recover.wkb_lambda"})
        if (real(key) * h > 0.5)
            fail(std::string(key) + " = " + raw(key) + " is too high for the grid: lambda * dx = " + shortest(real(key) * h) +
                 " exceeds 0.5");
    for (const char* key : {"probes.order", "recover.wkb_order"})
        if (integer(key) < 1 || integer(key) > 4) fail(std::string(key) + " must lie in [1, 4]");
    auto sf = count("recover.space_factor"), tf = count("recover.time_factor");
    if (sf == 0 || tf == 0 || (nx - 1) % sf || (ny - 1) % sf || (nt - 1) % tf)
        fail("recover.space_factor and recover.time_factor must divide the grid intervals");
    auto nd = count("recover.wkb_directions");
    if (nd != 3 && nd != 6) fail("recover.wkb_directions must be 3 or 6");
    for (double id : real_list("report.criteria"))
        if (id != std::floor(id) || id < 1 || id > 8) fail("report.criteria entries must be integers in [1, 8]");
    for (const char* key : {"expand.eps_list", "iomap.eps_list", "lightray.h_list"}) {
        auto v = real_list(key);
        for (std::size_t n = 0; n < v.size(); ++n) {
            if (v[n] <= 0) fail(std::string(key) + " entries must be positive");
            if (n > 0 && v[n] >= v[n - 1]) fail(std::string(key) + " must be strictly decreasing");
        }
    }
    if (real_list("expand.eps_list").size() < 2 || real_list("iomap.eps_list").size() < 2)
        fail("epsilon sweeps need at least two values");
    if (count("identity.probes") == 0) fail("identity.probes must be positive");
    if (real("recover.ridge") < 0 || real("recover.noise") < 0) fail("recover.ridge and recover.noise must not be negative");
    if (real("medium.t_on") < 0 || real("medium.t_off") > real("grid.T") || real("medium.t_on") >= real("medium.t_off"))
        fail("medium.t_on < medium.t_off must lie in [0, grid.T]");
}

ScenarioSpec Config::scenario() const {
    ScenarioSpec s;
    s.nx = count("grid.nx");
    s.ny = count("grid.ny");
    s.nt = count("grid.nt");
    s.Lx = real("grid.Lx");
    s.Ly = real("grid.Ly");
    s.T = real("grid.T");
    s.cfl_safety = real("grid.cfl_safety");
    s.b.amplitude = {real("medium.b_t"), real("medium.b_x"), real("medium.b_y")};
    s.b.cx = real("medium.cx");
    s.b.cy = real("medium.cy");
    s.b.radius = real("medium.radius");
    s.b.t_on = real("medium.t_on");
    s.b.t_off = real("medium.t_off");
    s.r_amp = real("medium.r_amp");
    s.validity_radius = real("medium.validity_radius");
    auto& d = s.data;
    d.phi_amp = real("data.phi_amp");
    d.phi_cx = real("data.phi_cx");
    d.phi_cy = real("data.phi_cy");
    d.phi_radius = real("data.phi_radius");
    d.psi_amp = real("data.psi_amp");
    d.f_amp = real("data.f_amp");
    d.f_freq = real("data.f_freq");
    d.t_quiet = real("data.t_quiet");
    d.t_ramp = real("data.t_ramp");
    d.variant = int(integer("data.variant"));
    return s;
}

ScenarioSpec Config::scenario2() const {
    auto s = scenario();
    s.b.amplitude = {real("medium2.b_t"), real("medium2.b_x"), real("medium2.b_y")};
    s.r_amp = real("medium2.r_amp");
    return s;
}

NonlinearOptions Config::solver_options() const {
    NonlinearOptions o;
    o.eps_max = real("solver.eps_max");
    o.max_iter = count("solver.max_iter");
    o.tol = real("solver.tol");
    o.blowup_factor = real("solver.blowup_factor");
    return o;
}

Scheme Config::scheme() const { return parse_scheme(word("solver.scheme")); }

EndToEndConfig Config::end_to_end() const {
    EndToEndConfig c;
    c.scenario = scenario();
    auto s2 = scenario2();
    c.b2 = s2.b;
    c.r2_amp = s2.r_amp;
    c.wkb_lambda = real("recover.wkb_lambda");
    c.wkb_order = int(integer("recover.wkb_order"));
    c.wkb_directions = count("recover.wkb_directions");
    c.go_directions = count("recover.go_directions");
    c.go_h = real("recover.go_h");
    c.go_radius = real("recover.go_radius");
    c.go_spacing = real("recover.go_spacing");
    c.space_factor = count("recover.space_factor");
    c.time_factor = count("recover.time_factor");
    c.ridge = real("recover.ridge");
    c.condition_cap = real("recover.condition_cap");
    c.pairing = parse_pairing(word("recover.pairing"));
    c.noise = real("recover.noise");
    c.seed = static_cast<std::uint64_t>(count("recover.seed"));
    c.extraction_data = count("recover.extraction_data");
    c.extraction_eps = real("recover.extraction_eps");
    return c;
}

} // namespace nlw
