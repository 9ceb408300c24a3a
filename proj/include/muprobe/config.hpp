#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "muprobe/bench.hpp"
#include "muprobe/blocks.hpp"
#include "muprobe/datadriven.hpp"
#include "muprobe/lti.hpp"

namespace muprobe {

/// Reads a JSON object from disk; ConfigError on I/O or syntax problems.
nlohmann::json load_json_file(const std::filesystem::path& path);

/// Either explicit matrices {"A","B","C","D"} or
/// {"random_stable": {"n", "n_x", "pole_radius_max", "seed"}}.
StateSpaceModel plant_from_config(const nlohmann::json& j);

/// A real matrix as nested rows, or {"re": rows, "im": rows}.
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j, const std::string& name);

struct EstimateConfig {
    StateSpaceModel plant;
    BlockStructure structure;
    RunOptions run;
    NoiseSpec noise;
    int warm_periods = 5;
};

/// Keys: plant, structure, N, seed, tol, max_iter, max_restarts,
/// noise_variance, warm_periods, real_mode. Unknown keys are rejected.
EstimateConfig parse_estimate_config(const nlohmann::json& j);

struct OracleConfig {
    std::optional<ComplexMatrix> matrix;
    std::optional<StateSpaceModel> plant;
    Index grid = 1024;
    BlockStructure structure;
    std::size_t samples = 20000;
    int iters = 50;
    std::uint64_t seed = 0;
};

/// Keys: matrix | (plant, grid), structure, samples, iters, seed.
OracleConfig parse_oracle_config(const nlohmann::json& j);

enum class CampaignKind { Test1, Test2, Noise };

struct BenchConfig {
    CampaignKind kind = CampaignKind::Test1;
    std::uint64_t seed = 0;
    std::optional<StateSpaceModel> plant;  ///< test1 / noise; absent = seeded default plant
    std::optional<BlockStructure> structure;
    bench::Test1Options test1;
    bench::Test2Options test2;
    bench::NoiseOptions noise;
};

/// Keys common to every kind: kind, seed, tol, max_iter, max_restarts,
/// warm_periods, real_mode. test1: plant, N_list, history_N, curve_case.
/// test2: n_list, configs, repetitions, tol_match, N, pole_radius_max.
/// noise: plant, structure, variances, repetitions, N.
BenchConfig parse_bench_config(const nlohmann::json& j);

const char* to_string(CampaignKind kind);

}  // namespace muprobe
