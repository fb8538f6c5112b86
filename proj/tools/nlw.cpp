// Command-line driver: nlw <subcommand> [--config FILE] [--set key=value]... [--out DIR] [--jobs N]

#include "nlw/config.hpp"
#include "nlw/errors.hpp"
#include "nlw/pipelines.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

// Exit codes.
constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Small-data nonlinear wave experiments: forward runs, expansions, input-output maps, probes, "
                 "light-ray checks and coefficient recovery."};
    std::string config_path, out_root = "runs";
    std::vector<std::string> overrides;
    std::size_t jobs = 1;
    bool print_dir = false;
    app.require_subcommand(1, 1);
    for (const auto& name : nlw::subcommands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " pipeline");
        sub->add_option("-c,--config", config_path, "INI configuration file (defaults to the reference configuration)");
        sub->add_option("-s,--set", overrides, "override a key: section.name=value")->take_all();
        sub->add_option("-o,--out", out_root, "root directory of the outputs")->capture_default_str();
        sub->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_flag("--print-dir", print_dir, "print only the output directory on success");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    nlw::Config cfg;
    std::filesystem::path dir;
    try {
        if (!config_path.empty()) cfg = nlw::Config::from_file(config_path);
        for (const auto& o : overrides) cfg.apply_override(o);
        cfg.validate();
        dir = nlw::output_directory(out_root, sub, cfg);
    } catch (const nlw::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }

    nlw::RunOptions opt;
    opt.jobs = jobs;
    opt.log = print_dir ? nullptr : &std::cerr;
    try {
        int code = nlw::run_subcommand(sub, cfg, dir, opt);
        std::cout << dir.string() << "\n";
        return code;
    } catch (const nlw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const nlw::InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const nlw::CflViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const nlw::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return exit_numerical;
    }
}
