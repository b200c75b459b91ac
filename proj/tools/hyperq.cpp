#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <hyperq/cli.hpp>

using namespace hyperq;

namespace
{

void add_common(CLI::App *sub, RunConfig &c)
{
    sub->add_option("--n", c.n, "Source dimension n");
    sub->add_option("--ell", c.ell, "Number of negative eigenvalues, ell <= n/2");
    sub->add_option("--degree", c.degree, "Truncation degree D");
    sub->add_option("--seed", c.seed, "Seed for generated instances");
    sub->add_option("--count", c.count, "Number of generated instances");
    sub->add_option("--jobs", c.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--sigma-max", c.sigma_max, "Largest weighted degree for cm-kernel");
    sub->add_option("--input", c.input, "Input series or model JSON");
    sub->add_option("--series", c.series, "Real series JSON");
    sub->add_option("--model", c.model, "Model JSON");
    sub->add_option("--model2", c.model2, "Second model JSON (equiv-verify)");
    sub->add_option("--automorphism", c.automorphism, "Automorphism JSON");
    sub->add_option("--h1,--h", c.h1, "Embedding JSON");
    sub->add_option("--h2", c.h2, "Second embedding JSON");
    sub->add_option("--drop", c.drop, "Constraint groups to drop: no_constant, jacobian, re_gww");
    sub->add_flag("--any-class", c.any_class, "cm-solve: do not require A in S_{n-1}");
    sub->add_option("--output,-o", c.output, "Report path (default: stdout)");
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Exact hyperquadric embedding and Chern-Moser toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    RunConfig config;
    for (const auto &name : command_names()) {
        CLI::App *sub = app.add_subcommand(name);
        sub->set_help_flag("--help", "Print this help message and exit");
        add_common(sub, config);
        sub->callback([&config, name] { config.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : exit_input_error;
    }

    RunResult result = run(config);
    std::string text = render_report(result.report);
    if (config.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(config.output, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << config.output << "\n";
            return exit_input_error;
        }
        out << text;
    }
    if (result.report.contains("error")) {
        std::cerr << "error: " << result.report["error"]["message"].get<std::string>() << "\n";
    }
    return result.exit_code;
}
