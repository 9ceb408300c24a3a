#include "muprobe/cli.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include <CLI11.hpp>

#include "muprobe/bench.hpp"
#include "muprobe/config.hpp"
#include "muprobe/datadriven.hpp"
#include "muprobe/io.hpp"
#include "muprobe/oracle.hpp"
#include "muprobe/power.hpp"

namespace muprobe::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Artifact {
    std::string file;
    std::string description;
};

json manifest(const std::string& command, const json& config, const std::vector<Artifact>& artifacts,
              json extra = json::object()) {
    json arts = json::array();
    for (const Artifact& a : artifacts) arts.push_back({{"file", a.file}, {"description", a.description}});
    json m = {{"tool", "muprobe"}, {"version", kVersion}, {"command", command}, {"config", config}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    m["artifacts"] = std::move(arts);
    return m;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

json effective_config(const CliConfig& cfg) {
    json j = cfg.config_path.empty() ? json::object() : load_json_file(cfg.config_path);
    const Overrides& o = cfg.overrides;
    const std::string kind = (j.contains("kind") && j.at("kind").is_string()) ? j.at("kind").get<std::string>() : "";

    if (o.seed) j["seed"] = *o.seed;
    if (o.tol) j["tol"] = *o.tol;
    if (o.max_iter) j["max_iter"] = *o.max_iter;
    if (o.reps) j["repetitions"] = *o.reps;
    if (o.n_freq) {
        if (cfg.subcommand == "oracle") {
            j["grid"] = *o.n_freq;
        } else if (cfg.subcommand == "bench" && kind == "test1") {
            j["N_list"] = json::array({*o.n_freq});
            j.erase("history_N");
        } else {
            j["N"] = *o.n_freq;
        }
    }
    if (o.noise) {
        if (cfg.subcommand == "bench" && kind == "noise") {
            j["variances"] = *o.noise > 0.0 ? json::array({0.0, *o.noise}) : json::array({0.0});
        } else {
            j["noise_variance"] = *o.noise;
        }
    }
    return j;
}

int cmd_estimate(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    json j;
    try {
        j = effective_config(cfg);
        const EstimateConfig ec = parse_estimate_config(j);
        SimulatedOracle oracle(ec.plant, ec.warm_periods, ec.noise);
        const MuEstimate est = run(oracle, ec.structure, ec.run);

        const Index N = ec.run.N;
        CsvTable bins({"bin_index", "omega", "mu_tilde", "mu_bar", "converged"});
        for (Index m = 0; m < N; ++m) {
            const auto i = static_cast<std::size_t>(m);
            bins.add_row({std::to_string(m), fmt(kTwoPi * static_cast<double>(m) / static_cast<double>(N)),
                          fmt(est.mu_tilde_curve[i]), fmt(est.mu_bar_curve[i]), est.converged_bins[i] ? "1" : "0"});
        }
        const json summary = {{"mu", est.mu},
                              {"peak_bin", est.peak_bin},
                              {"peak_omega", est.peak_omega},
                              {"iterations", est.iterations},
                              {"restarts", est.restarts},
                              {"experiments", est.experiments},
                              {"converged", est.converged}};
        write_file_atomic(cfg.out_dir / "bins.csv", bins.str());
        write_json(cfg.out_dir / "summary.json", summary);
        write_json(cfg.out_dir / "manifest.json",
                   manifest("estimate", j,
                            {{"bins.csv", "per-bin mu estimates"}, {"summary.json", "peak estimate and run counters"}},
                            {{"seeds", {{"run", ec.run.seed}, {"noise", ec.noise.seed}}}}));

        if (!cfg.quiet) {
            out << "mu = " << fmt(est.mu) << " at omega = " << fmt(est.peak_omega) << " rad (bin " << est.peak_bin
                << " of " << N << ")\n";
            out << "iterations = " << est.iterations << ", restarts = " << est.restarts
                << ", experiments = " << est.experiments << "\n";
            out << (est.converged ? "converged" : "NOT converged: best estimate reported") << "\n";
        }
        return est.converged ? kExitOk : kExitUnconverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_oracle(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const json j = effective_config(cfg);
        const OracleConfig oc = parse_oracle_config(j);
        json result;
        if (oc.matrix) {
            const BoundsReport rep = bounds(*oc.matrix, oc.structure, {oc.samples, oc.iters, oc.seed});
            result = to_json(rep);
            result["sigma_max"] = max_singular_value(*oc.matrix);
            result["rho"] = spectral_radius(*oc.matrix);
        } else {
            const StateSpaceModel& plant = *oc.plant;
            PowerIterationOptions popt;
            popt.seed = oc.seed;
            const GridMuResult g = model_mu_over_grid(plant, oc.structure, oc.grid, popt);
            const Index pk = std::max<Index>(g.peak_bin, 0);
            const double pk_omega = kTwoPi * static_cast<double>(pk) / static_cast<double>(oc.grid);
            BoundsReport rep;
            rep.lower = random_search_lower_bound(freq_response(plant, pk_omega), oc.structure, oc.samples, oc.seed);
            rep.lower_method = "random_search_at_peak";
            if (g.peak_converged && g.peak > rep.lower) {
                rep.lower = g.peak;
                rep.lower_method = "power_iteration_grid";
            }
            rep.upper = rep.lower;
            HinfPeak hinf;
            for (Index m = 0; m < oc.grid; ++m) {
                const double w = kTwoPi * static_cast<double>(m) / static_cast<double>(oc.grid);
                const ComplexMatrix M = freq_response(plant, w);
                const double s = max_singular_value(M);
                if (m == 0 || s > hinf.value) hinf = {s, m, w};
                // upper(w) <= sigma_max(w): such bins cannot raise the maximum.
                if (s > rep.upper) rep.upper = std::max(rep.upper, diag_scaling_upper_bound(M, oc.structure, oc.iters));
            }
            rep.upper_method = "diag_scaling_grid";
            result = to_json(rep);
            result["peak_bin"] = pk;
            result["peak_omega"] = pk_omega;
            result["hinf_grid"] = hinf.value;
            result["hinf_omega"] = hinf.omega;
        }
        write_json(cfg.out_dir / "oracle.json", result);
        write_json(cfg.out_dir / "manifest.json",
                   manifest("oracle", j, {{"oracle.json", "lower and upper bounds on mu"}},
                            {{"seeds", {{"search", oc.seed}}}}));
        if (!cfg.quiet) {
            out << "lower = " << fmt(result["lower"].get<double>()) << " (" << result["lower_method"].get<std::string>()
                << ")\n";
            out << "upper = " << fmt(result["upper"].get<double>()) << " (" << result["upper_method"].get<std::string>()
                << ")\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_bench(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const json j = effective_config(cfg);
        const BenchConfig bc = parse_bench_config(j);
        std::vector<Artifact> artifacts;
        json extra = {{"kind", to_string(bc.kind)}, {"seeds", {{"campaign", bc.seed}}}};

        std::optional<StateSpaceModel> plant = bc.plant;
        auto ensure_plant = [&]() {
            if (plant) return;
            const bench::DefaultPlant dp = bench::default_test1_plant(bc.seed);
            extra["default_plant"] = {{"plant_seed", dp.plant_seed},
                                      {"candidates", dp.candidates},
                                      {"max_gap", dp.max_gap},
                                      {"verified", dp.verified}};
            plant = dp.model;
        };

        std::vector<std::string> lines;
        int violations = 0;
        auto check = [&](double mu, double upper) {
            if (mu > upper + 1e-6 * std::max(1.0, upper)) ++violations;
        };

        switch (bc.kind) {
            case CampaignKind::Test1: {
                bench::Test1Result r;
                if (!bc.test1.N_list.empty()) {
                    ensure_plant();
                    r = bench::run_test1(*plant, bc.test1);
                }
                for (const auto& row : r.rows) {
                    check(row.mu, row.upper);
                    lines.push_back("case " + std::to_string(row.case_id) + " N=" + std::to_string(row.N) +
                                    ": mu=" + fmt(row.mu) + " model=" + fmt(row.mu_model) +
                                    (row.converged ? "" : " (not converged)") +
                                    (row.error.empty() ? "" : " error: " + row.error));
                }
                for (const std::string& f : bench::write_test1(r, cfg.out_dir)) artifacts.push_back({f, "structure sweep"});
                if (plant) {
                    write_json(cfg.out_dir / "plant.json", to_json(*plant));
                    artifacts.push_back({"plant.json", "plant used for the sweep"});
                }
                break;
            }
            case CampaignKind::Test2: {
                const bench::Test2Result r = bench::run_test2(bc.test2);
                for (const auto& run : r.runs) check(run.mu, run.upper);
                for (const auto& row : r.table)
                    lines.push_back("n=" + std::to_string(row.n) + " config " + bench::config_label(row.config) +
                                    ": " + fmt(row.pct_converged) + "% converged and matching (" +
                                    std::to_string(row.matched) + "/" + std::to_string(row.runs) + ")");
                for (const std::string& f : bench::write_test2(r, cfg.out_dir))
                    artifacts.push_back({f, "randomized convergence study"});
                break;
            }
            case CampaignKind::Noise: {
                ensure_plant();
                const BlockStructure s = bc.structure ? *bc.structure : bench::table1_cases()[3].structure;
                if (s.n() != plant->n())
                    throw DimensionError("structure block sizes must sum to the plant's channel count");
                const bench::NoiseResult r = bench::run_noise_study(*plant, s, bc.noise);
                for (const auto& row : r.rows)
                    lines.push_back("sigma2=" + fmt(row.sigma2) + ": mu_tilde=" + fmt(row.mu_tilde_mean) +
                                    " mu_bar=" + fmt(row.mu_bar_mean));
                lines.push_back("model: mu=" + fmt(r.model_mu));
                for (const std::string& f : bench::write_noise_study(r, cfg.out_dir))
                    artifacts.push_back({f, "noise sensitivity table"});
                write_json(cfg.out_dir / "plant.json", to_json(*plant));
                artifacts.push_back({"plant.json", "plant used for the study"});
                extra["structure"] = to_json(s);
                break;
            }
        }
        if (bc.kind != CampaignKind::Noise) extra["sandwich_violations"] = violations;
        write_json(cfg.out_dir / "manifest.json", manifest("bench", j, artifacts, extra));
        if (!cfg.quiet) {
            for (const std::string& l : lines) out << l << "\n";
            out << "wrote " << artifacts.size() + 1 << " files to " << cfg.out_dir.string() << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Data-driven lower bounds on the structured singular value"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CliConfig cfg;
    std::uint64_t seed = 0;
    long long n_freq = 0;
    double tol = 0.0, noise = 0.0;
    int reps = 0, max_iter = 0;
    std::string out_dir = cfg.out_dir.string();

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"estimate", "run the data-driven estimator on a plant"},
                        {"oracle", "bracket mu for a matrix or a plant over a frequency grid"},
                        {"bench", "run a campaign: test1 | test2 | noise"}};
    std::vector<CLI::App*> apps;
    std::vector<std::vector<CLI::Option*>> opts;
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        std::vector<CLI::Option*> o;
        sub->add_option("--config", cfg.config_path, "JSON config file");
        o.push_back(sub->add_option("--seed", seed, "random seed (U64)"));
        o.push_back(sub->add_option("--n-freq", n_freq, "number of frequency bins N"));
        o.push_back(sub->add_option("--tol", tol, "relative convergence tolerance"));
        o.push_back(sub->add_option("--noise", noise, "output noise variance"));
        o.push_back(sub->add_option("--reps", reps, "repetitions per campaign cell"));
        o.push_back(sub->add_option("--max-iter", max_iter, "iterations per attempt"));
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_flag("--quiet", cfg.quiet, "suppress the printed summary");
        apps.push_back(sub);
        opts.push_back(std::move(o));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    for (std::size_t i = 0; i < apps.size(); ++i) {
        if (!apps[i]->parsed()) continue;
        cfg.subcommand = subs[i].name;
        const auto& o = opts[i];
        if (o[0]->count()) cfg.overrides.seed = seed;
        if (o[1]->count()) cfg.overrides.n_freq = n_freq;
        if (o[2]->count()) cfg.overrides.tol = tol;
        if (o[3]->count()) cfg.overrides.noise = noise;
        if (o[4]->count()) cfg.overrides.reps = reps;
        if (o[5]->count()) cfg.overrides.max_iter = max_iter;
    }
    cfg.out_dir = out_dir;

    if (cfg.subcommand == "estimate") return cmd_estimate(cfg, out, err);
    if (cfg.subcommand == "oracle") return cmd_oracle(cfg, out, err);
    return cmd_bench(cfg, out, err);
}

}  // namespace muprobe::cli
