#include "doctest.h"

#include "nlw/config.hpp"
#include "nlw/errors.hpp"
#include "nlw/pipelines.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

using namespace nlw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("nlw_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct CliResult {
    int code = -1;
    std::string out, err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
    auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    std::string cmd = std::string(NLW_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

// Small grid that keeps pipeline runs short.
Config small() {
    Config c;
    c.set("grid.nx", "17");
    c.set("grid.ny", "17");
    c.set("grid.nt", "81");
    c.set("probes.lambda", "8");
    return c;
}

} // namespace

TEST_CASE("the shipped reference file equals the defaults") {
    CHECK(Config::from_file(NLW_REFERENCE_CONFIG) == Config());
}

TEST_CASE("defaults are the reference configuration") {
    Config c;
    auto s = c.scenario();
    CHECK(s.nx == 33);
    CHECK(s.nt == 161);
    CHECK(s.T == 2.5);
    CHECK(c.real("recover.ridge") == default_ridge);
    CHECK(c.end_to_end().wkb_directions == 6);
    CHECK(c.word("recover.pairing") == "scheme");
    CHECK_NOTHROW(c.validate());
    // T exceeds the diameter of the unit square.
    CHECK(s.T > std::sqrt(2.0));
}

TEST_CASE("canonical text round-trips and drives the hash") {
    Config c;
    c.set("grid.T", " 2.50 ");
    c.set("expand.eps_list", "0.08, 0.04,0.02");
    auto again = Config::from_string(c.canonical());
    CHECK(again == c);
    CHECK(again.canonical() == c.canonical());
    CHECK(again.hash() == c.hash());
    CHECK(c.hash_hex().size() == 16);
    auto d = c;
    d.set("grid.T", "2.6");
    CHECK(d.hash() != c.hash());
    CHECK(c.raw("expand.eps_list") == "0.08,0.04,0.02");
    CHECK(c.raw("recover.condition_cap") == "1e+06");
}

TEST_CASE("files with sections, comments and overrides") {
    auto dir = scratch("config_file");
    {
        std::ofstream out(dir / "a.ini");
        out << "# comment\n[grid]\nnx = 17 ; inline\nny=17\n\n[recover]\npairing = continuum\n";
    }
    auto c = Config::from_file(dir / "a.ini");
    CHECK(c.count("grid.nx") == 17);
    CHECK(c.word("recover.pairing") == "continuum");
    c.apply_override("grid.nt=81");
    CHECK(c.count("grid.nt") == 81);
    CHECK_THROWS_AS(c.apply_override("grid.nt"), ConfigError);
    CHECK_THROWS_AS(Config::from_file(dir / "missing.ini"), ConfigError);
}

TEST_CASE("unknown keys fail closed with a suggestion") {
    try {
        Config::from_string("[forward]\nepzilon = 0.1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string m = e.what();
        CHECK(m.find("did you mean 'eps'") != std::string::npos);
        CHECK(m.find("forward.eps") != std::string::npos);
    }
    CHECK(suggest_key("epzilon") == "forward.eps");
    CHECK(suggest_key("grid.nxx") == "grid.nx");
    CHECK(suggest_key("recover.ridg") == "recover.ridge");
    CHECK(suggest_key("qqqqqqqqqqqq") == "");
    Config c;
    CHECK_THROWS_AS(c.set("grid.bogus", "1"), ConfigError);
    CHECK_THROWS_AS(c.raw("grid.bogus"), ConfigError);
}

TEST_CASE("malformed values and inconsistent combinations") {
    Config c;
    CHECK_THROWS_AS(c.set("grid.nx", "3.5"), ConfigError);
    CHECK_THROWS_AS(c.set("grid.T", "abc"), ConfigError);
    CHECK_THROWS_AS(c.set("grid.T", "inf"), ConfigError);
    CHECK_THROWS_AS(c.set("recover.pairing", "exact"), ConfigError);
    CHECK_THROWS_AS(c.set("expand.eps_list", ""), ConfigError);

    auto g = c;
    g.set("probes.lambda", "20");
    CHECK_THROWS_AS(g.validate(), ConfigError);
    auto f = c;
    f.set("recover.space_factor", "5");
    CHECK_THROWS_AS(f.validate(), ConfigError);
    auto e = c;
    e.set("expand.eps_list", "0.01,0.02");
    CHECK_THROWS_AS(e.validate(), ConfigError);
    auto w = c;
    w.set("recover.wkb_directions", "4");
    CHECK_THROWS_AS(w.validate(), ConfigError);
    auto r = c;
    r.set("report.criteria", "9");
    CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("edit distance") {
    CHECK(edit_distance("", "") == 0);
    CHECK(edit_distance("eps", "") == 3);
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("ridge", "ridge") == 0);
}

TEST_CASE("pipeline outputs are reproducible and echo the configuration") {
    auto root = scratch("pipeline");
    auto c = small();
    auto dir = output_directory(root, "lightray", c);
    CHECK(dir.filename().string() == "lightray-" + c.hash_hex());
    CHECK(run_subcommand("lightray", c, dir) == 0);
    std::map<std::string, std::string> first;
    for (const auto& e : fs::directory_iterator(dir)) first[e.path().filename().string()] = slurp(e.path());
    CHECK(first.count("raydata.csv") == 1);
    CHECK(first.count("fourier_slice.csv") == 1);
    CHECK(first.count("concentration.csv") == 1);
    CHECK(Config::from_string(first.at("config.ini")) == c);

    fs::remove_all(dir);
    RunOptions opt;
    opt.jobs = 3;
    CHECK(run_subcommand("lightray", c, dir, opt) == 0);
    for (const auto& [name, bytes] : first) CHECK(slurp(dir / name) == bytes);

    CHECK_THROWS_AS(run_subcommand("bogus", c, dir), ConfigError);
}

TEST_CASE("identity and probes pipelines write their reports") {
    auto root = scratch("pipeline2");
    auto c = small();
    c.set("identity.probes", "4");
    auto d1 = output_directory(root, "identity", c);
    CHECK(run_subcommand("identity", c, d1) == 0);
    CHECK(fs::exists(d1 / "identity_report.csv"));
    auto d2 = output_directory(root, "probes", c);
    CHECK(run_subcommand("probes", c, d2) == 0);
    CHECK(fs::exists(d2 / "probes_report.csv"));
    CHECK(fs::exists(d2 / "wkb_0_re.nlwf"));
    CHECK(fs::exists(d2 / "go_plus.nlwf"));
}

TEST_CASE("command line: exit codes and suggestions") {
    auto dir = scratch("cli");
    auto bad = run_cli("lightray --set forward.epzilon=0.1 -o " + (dir / "runs").string(), dir);
    CHECK(bad.code == 2);
    CHECK(bad.err.find("did you mean 'eps'") != std::string::npos);

    auto guard = run_cli("probes --set probes.lambda=40 -o " + (dir / "runs").string(), dir);
    CHECK(guard.code == 2);
    CHECK(guard.err.find("lambda") != std::string::npos);

    CHECK(run_cli("", dir).code == 2);
    CHECK(run_cli("lightray --config " + (dir / "missing.ini").string(), dir).code == 2);

    // A failing acceptance criterion gives exit code 4. An unstable time step
    // makes criterion 3 fail without running the heavier ones.
    auto fail = run_cli("report --set report.criteria=3 --set grid.nt=21 -o " + (dir / "runs").string(), dir);
    CHECK(fail.code == 4);

    std::string args = "lightray --set grid.nx=17 --set grid.ny=17 --set grid.nt=81 --set probes.lambda=8 --print-dir -o " + (dir / "runs").string();
    auto a = run_cli(args, dir);
    REQUIRE(a.code == 0);
    fs::path out = a.out.substr(0, a.out.find('\n'));
    auto bytes = slurp(out / "raydata.csv");
    fs::remove_all(out);
    auto b = run_cli(args + " --jobs 2", dir);
    CHECK(b.code == 0);
    CHECK(slurp(out / "raydata.csv") == bytes);
}

TEST_CASE("expand on the shipped reference configuration") {
    auto dir = scratch("cli_expand");
    auto r = run_cli(std::string("expand --print-dir --config ") + NLW_REFERENCE_CONFIG + " --set expand.cubic_amp=0 -o " +
                         (dir / "runs").string(),
                     dir);
    REQUIRE(r.code == 0);
    fs::path out = r.out.substr(0, r.out.find('\n'));
    std::istringstream csv(slurp(out / "expansion_report.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header.find("eps") != std::string::npos);
    auto expected = Config::from_file(NLW_REFERENCE_CONFIG);
    expected.set("expand.cubic_amp", "0");
    CHECK(Config::from_file(out / "config.ini") == expected);
}
