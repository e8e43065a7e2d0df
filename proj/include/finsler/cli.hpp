#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "finsler/classifier.hpp"

namespace finsler {

enum class Command { tensors, classify, verify, list_metrics };
enum class Format { json, text };

/// Everything one CLI invocation needs. Unset optionals fall back to the fixture defaults.
struct RunConfig {
    Command command = Command::classify;
    std::string spec;  // fixture name or metric file path
    std::optional<std::uint64_t> seed;
    int count = 10;
    std::optional<std::vector<Interval>> x_box, y_box;
    std::optional<double> eps_y;
    ToleranceConfig tolerances;
    std::string out;  // empty: standard output
    Format format = Format::json;
    std::uint64_t synthetic_seed = 7;
};

Command parse_command(const std::string& name);
Format parse_format(const std::string& name);
/// "lo:hi" or "lo:hi,lo:hi,..."; a single interval is repeated across the dimension.
std::vector<Interval> parse_box(const std::string& text);

/// Applies "key = value" lines (spec, seed, count, format, out, x_box, y_box, eps_y,
/// tolerances = PATH, tol.NAME = VALUE). Relative paths resolve against base_dir.
void merge_run_config(RunConfig& cfg, const std::string& text, const std::string& base_dir = ".");

/// Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical error.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace finsler
