#ifndef HYPERQ_CLI_HPP
#define HYPERQ_CLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <hyperq/io.hpp>

namespace hyperq
{

inline constexpr const char *kVersion = "0.1.0";

inline const std::vector<std::string> &command_names()
{
    static const std::vector<std::string> names = {"analyze",      "decompose", "embed",         "restrict",
                                                   "cm-solve",     "cm-kernel", "equiv-verify",  "rigidity",
                                                   "normalize-map", "transform", "thm12-sweep"};
    return names;
}

struct RunConfig {
    std::string command;
    std::optional<int> n, ell, degree, count, sigma_max;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    // Paths; empty when unset.
    std::string input, series, model, model2, automorphism, h1, h2, output;
    // cm-kernel: constraint groups to drop (no_constant, jacobian, re_gww).
    std::vector<std::string> drop;
    // cm-solve: run even when A is not in S_{n-1}.
    bool any_class = false;
};

enum ExitCode { exit_ok = 0, exit_input_error = 1, exit_negative = 2 };

struct RunResult {
    int exit_code = exit_ok;
    Json report;
};

// Never throws for bad input: errors become exit_input_error with an "error"
// object in the report. The report always carries "regime" and "provenance".
RunResult run(const RunConfig &config);

// Two-space indented JSON with a trailing newline.
std::string render_report(const Json &report);

} // namespace hyperq

#endif
