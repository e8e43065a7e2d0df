#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "finsler/cli.hpp"
#include "finsler/errors.hpp"

using namespace finsler;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

// Precedence: built-in defaults < --config file < --tolerances file < individual flags.
int main(int argc, char** argv) {
    CLI::App app{"Finsler tensor calculus, classification and identity checks"};
    app.require_subcommand(1);

    std::string spec, config, tol_file, out, format, x_box, y_box;
    std::uint64_t seed = 0;
    int count = 0;
    double eps_y = 0.0;
    std::vector<std::string> tols;

    app.add_option("--spec", spec, "Fixture name or metric file");
    app.add_option("--seed", seed, "Sampling seed");
    app.add_option("--count", count, "Number of sample points");
    app.add_option("--tol", tols, "Tolerance override NAME=VALUE (repeatable)");
    app.add_option("--out", out, "Output file (default: standard output)");
    app.add_option("--format", format, "json or text");
    app.add_option("--config", config, "Run config file (key = value lines)");
    app.add_option("--tolerances", tol_file, "Tolerance file (predicate = value lines)");
    app.add_option("--x-box", x_box, "x sampling box lo:hi[,lo:hi...]");
    app.add_option("--y-box", y_box, "y sampling box lo:hi[,lo:hi...]");
    app.add_option("--eps-y", eps_y, "Minimum |y| of sampled directions");

    std::string command;
    for (const char* name : {"tensors", "classify", "verify", "list-metrics"}) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->callback([&command, name] { command = name; });
    }
    app.get_subcommand("tensors")->description("Dump geometry frames at sampled points");
    app.get_subcommand("classify")->description("Evaluate the 26 predicates");
    app.get_subcommand("verify")->description("Run the identity suite");
    app.get_subcommand("list-metrics")->description("List the built-in fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }

    RunConfig cfg;
    try {
        cfg.command = parse_command(command);
        if (!config.empty())
            merge_run_config(cfg, read_text(config), std::filesystem::path(config).parent_path().string());
        if (!tol_file.empty()) cfg.tolerances.merge_text(read_text(tol_file));
        if (app.count("--spec")) cfg.spec = spec;
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--count")) cfg.count = count;
        if (app.count("--out")) cfg.out = out;
        if (app.count("--format")) cfg.format = parse_format(format);
        if (app.count("--x-box")) cfg.x_box = parse_box(x_box);
        if (app.count("--y-box")) cfg.y_box = parse_box(y_box);
        if (app.count("--eps-y")) cfg.eps_y = eps_y;
        for (const auto& t : tols) cfg.tolerances.set(t);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    return run(cfg, std::cout, std::cerr);
}
