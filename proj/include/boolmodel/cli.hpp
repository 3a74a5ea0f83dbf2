#pragma once

// JSON run configs, experiment dispatch and the run manifest.
//
// Config layout:
//   {
//     "model": {"dimension": 2, "lambda": 0.15,
//               "radius": {"type": "constant", "r": 1}},
//     "master_seed": 1,
//     "replicates": 10000,
//     "experiments": {"ell_tail": {...}, "crossing_decay": {...}, ...}
//   }
// Unknown keys anywhere are errors. Optional keys take documented defaults
// and the fully resolved config is echoed into manifest.json.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boolmodel/experiments.hpp"

namespace boolmodel::cli {

inline constexpr std::string_view kVersion = "boolmodel 1.0.0";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ModelParams params;
    std::uint64_t master_seed = 1;
    std::size_t replicates = 1;
    std::optional<EllTailConfig> ell_tail;
    std::optional<CrossingConfig> crossing_decay;
    std::optional<MomentSweepConfig> moment_sweep;
    std::optional<BracketConfig> lambda_bracket;
    std::optional<PiAlphaConfig> pi_alpha;
    /// Resolved config (defaults filled in) as pretty-printed JSON.
    std::string resolved;
};

/// Parses and validates a config document. `seed_override` replaces
/// master_seed before per-experiment seeds are resolved.
RunConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override = {});

RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::uint64_t> seed_override = {});

/// Runs every configured experiment, writing CSVs into `out_dir`, then
/// manifest.json (atomically, last). Returns the CSV file names.
std::vector<std::string> run_experiments(const RunConfig& cfg,
                                         const std::filesystem::path& out_dir,
                                         const RunOptions& run);

/// Thread count from BOOLSIM_THREADS, else 1.
unsigned default_threads();

int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed, unsigned threads, std::ostream& out,
            std::ostream& err);

int cmd_oracle(std::string_view suite, unsigned threads, std::ostream& out, std::ostream& err);

}  // namespace boolmodel::cli
