#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace muprobe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnconverged = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<long long> n_freq;
    std::optional<double> tol;
    std::optional<double> noise;
    std::optional<int> reps;
    std::optional<int> max_iter;
};

struct CliConfig {
    std::string subcommand;
    std::filesystem::path config_path;  ///< empty = start from {}
    Overrides overrides;
    std::filesystem::path out_dir = "muprobe-out";
    bool quiet = false;
};

/// Folds the flag overrides into the file config under the keys of the
/// subcommand's schema, so they pass through the same validation.
nlohmann::json effective_config(const CliConfig& cfg);

int cmd_estimate(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_oracle(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const CliConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (estimate | oracle | bench plus flags) and dispatches.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace muprobe::cli
