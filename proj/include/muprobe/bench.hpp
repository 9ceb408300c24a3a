#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "muprobe/blocks.hpp"
#include "muprobe/datadriven.hpp"
#include "muprobe/lti.hpp"

namespace muprobe::bench {

struct TableCase {
    int id;
    BlockStructure structure;
    bool may_not_converge;  ///< large repeated-scalar blocks (cases 1 and 3)
};

/// The eight 3x3 structures of the structure sweep, in case order.
const std::vector<TableCase>& table1_cases();

/// Randomized-study configurations: 1 = single full block, 2 = n scalar 1x1
/// blocks, 3 = half scalar 1x1 blocks plus one full block of the rest.
BlockStructure test2_structure(int config, Index n);
std::string config_label(int config);

/// max_w upper(w) - max_w lower(w) over a `grid`-point sweep, where lower is
/// the model-based power iteration and upper the diagonal scaling bound.
double bounds_gap(const StateSpaceModel& model, const BlockStructure& structure, Index grid);

struct DefaultPlant {
    StateSpaceModel model;
    std::uint64_t plant_seed = 0;
    int candidates = 0;    ///< plants examined
    double max_gap = 0.0;  ///< worst bounds_gap over the eight cases
    bool verified = false; ///< max_gap < gap_tol
};

/// Seeded search for a 3x3 plant whose lower and upper bounds coincide (gap
/// below gap_tol) for every structure of the sweep. Falls back to the
/// smallest-gap candidate, unverified, when none qualifies.
DefaultPlant default_test1_plant(std::uint64_t seed, Index grid = 128, double gap_tol = 1e-3, int max_candidates = 64);

struct Test1Options {
    std::vector<Index> N_list{256, 1024, 4096};
    std::uint64_t seed = 0;
    RunOptions run;       ///< N and seed are set per run
    int warm_periods = 5;
    Index history_N = 0;  ///< iteration histories at this N; 0 = last of N_list
    int curve_case = 4;   ///< mu over frequency for this case at history_N
    std::size_t threads = 0;
};

struct Test1Row {
    int case_id = 0;
    std::string structure;
    Index N = 0;
    double mu_tilde = 0.0, mu_bar = 0.0, mu = 0.0;
    double mu_model = 0.0;
    bool converged = false;
    bool model_converged = false;
    Index peak_bin = -1;
    double peak_omega = 0.0;
    double upper = 0.0;  ///< diagonal scaling bound at the peak bin
    int iterations = 0, restarts = 0;
    std::uint64_t experiments = 0;
    std::string error;  ///< non-empty when the run threw
};

struct Test1Result {
    std::vector<Test1Row> rows;  ///< case-major, N-minor
    Index history_N = 0;
    std::vector<std::pair<int, std::vector<std::pair<double, double>>>> histories;
    int curve_case = 0;
    std::vector<double> curve_mu_tilde, curve_mu_bar, curve_mu_model;
};

Test1Result run_test1(const StateSpaceModel& plant, const Test1Options& options);

struct Test2Options {
    std::vector<Index> n_list{2, 3, 4, 5, 6};
    std::vector<int> configs{1, 2, 3};
    int repetitions = 25;
    std::uint64_t seed = 0;
    double tol_match = 0.02;
    Index N = 256;
    RunOptions run;
    int warm_periods = 5;
    double pole_radius_max = 0.9;
    std::size_t threads = 0;
};

struct Test2Run {
    Index n = 0;
    int config = 0;
    int rep = 0;
    double mu_tilde = 0.0, mu_bar = 0.0, mu = 0.0, mu_model = 0.0;
    double upper = 0.0;
    bool converged = false;
    bool matched = false;  ///< converged and (mu~ + mu-)/2 within tol_match of mu_model
    std::string error;
};

struct Test2Row {
    Index n = 0;
    int config = 0;
    int runs = 0;
    int matched = 0;
    double pct_converged = 0.0;
};

struct Test2Result {
    std::vector<Test2Row> table;  ///< sorted by (n, config)
    std::vector<Test2Run> runs;   ///< sorted by (n, config, rep)
};

Test2Result run_test2(const Test2Options& options);

struct NoiseOptions {
    std::vector<double> variances{0.0, 1e-6, 1e-4, 1e-2};
    int repetitions = 10;
    std::uint64_t seed = 0;
    Index N = 1024;
    RunOptions run;
    int warm_periods = 5;
    std::size_t threads = 0;
};

struct NoiseRow {
    double sigma2 = 0.0;
    double mu_tilde_mean = 0.0, freq_tilde = 0.0;
    double mu_bar_mean = 0.0, freq_bar = 0.0;
    int runs = 0, converged = 0;
};

struct NoiseResult {
    std::vector<NoiseRow> rows;
    double model_mu = 0.0;  ///< noiseless model-based reference
    double model_freq = 0.0;
    /// per (variance, repetition): max over bins of mu~ and mu-, with their omegas
    std::vector<std::vector<std::pair<double, double>>> tilde_peaks, bar_peaks;
};

/// Per variance, mean over repetitions of the largest mu~ (and mu-) over the
/// grid, and the median of the frequencies where they occur. Repetition r
/// uses the same initial state at every variance, so the zero-variance row
/// reproduces a noiseless run exactly.
NoiseResult run_noise_study(const StateSpaceModel& plant, const BlockStructure& structure, const NoiseOptions& options);

/// Writers return the file names they created inside `dir`.
std::vector<std::string> write_test1(const Test1Result& result, const std::filesystem::path& dir);
std::vector<std::string> write_test2(const Test2Result& result, const std::filesystem::path& dir);
std::vector<std::string> write_noise_study(const NoiseResult& result, const std::filesystem::path& dir);

}  // namespace muprobe::bench
