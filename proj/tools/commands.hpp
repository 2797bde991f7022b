// Command implementations behind the remskit executable.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace remskit::cli {

struct Options {
    std::filesystem::path scene;
    std::filesystem::path out_dir;  // empty: $REMSKIT_OUT_DIR, then the current directory
    std::optional<std::uint64_t> seed;
    double tol = 1e-9;
    std::string name;  // model, channel or problem
    double phi_deg = 0.0;
    double step_deg = 1.0;
    std::filesystem::path input;   // extract: response file
    std::filesystem::path output;  // extract: kernel bundle, default <out>/<stem>.kernels
};

std::filesystem::path output_dir(const Options& opt);

void cmd_grid(const Options& opt);
void cmd_extract(const Options& opt);
void cmd_solve(const Options& opt);
void cmd_channel(const Options& opt);
void cmd_gain_pattern(const Options& opt);
void cmd_optimize(const Options& opt);

// Parses argv and runs one command. Returns 0 on success, 1 for user errors, 2 for numeric failures.
int run_cli(int argc, const char* const* argv);

}  // namespace remskit::cli
