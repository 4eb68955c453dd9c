#pragma once

// Run configuration: generator files in sectioned key = value form, numeric
// parameter validation, and the provenance hash stamped into CSV headers.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "thinlab/ball.hpp"
#include "thinlab/generators.hpp"

namespace thinlab {

// Raised on invalid user input; the CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::vector<Mat2Z> generator_half;   // as listed; inverses appended by the system
    std::uint64_t element_budget = 8'000'000;
    int threads = 0;                     // 0: THINLAB_THREADS or 1
    double window_slack = 3.0;
    double window_pad = 8.0;
    std::string source_text;             // raw config file, for the provenance hash

    GeneratorSystem system() const { return GeneratorSystem(generator_half); }
    BallOptions ball_options() const {
        BallOptions opt;
        opt.element_budget = element_budget;
        opt.threads = threads;
        opt.window_slack = window_slack;
        opt.window_pad = window_pad;
        return opt;
    }
};

// Sections: [generators] with repeated `gen = a b c d` lines, optional [run]
// with budget / threads / window_slack / window_pad. Throws ConfigError
// naming the first offending field.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// FNV-1a over the config text plus the argument vector, printed as hex.
std::string config_hash(const RunConfig& config, const std::vector<std::string>& args);

// Square-free modulus from user input; rejects 0 and non-square-free values
// with a ConfigError instead of the library invalid_argument.
std::uint64_t validated_modulus(std::uint64_t q);

}  // namespace thinlab
