#include "muprobe/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace muprobe {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

long long get_int(const json& j, const char* key, long long fallback, long long lo, long long hi) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw ConfigError(std::string("'") + key + "' must be in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "], got " + std::to_string(x));
    return x;
}

std::uint64_t get_seed(const json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
}

double get_double(const json& j, const char* key, double fallback, double lo, bool lo_open) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || (lo_open && x == lo))
        throw ConfigError(std::string("'") + key + "' must be " + (lo_open ? "> " : ">= ") + std::to_string(lo));
    return x;
}

bool get_bool(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ConfigError(std::string("'") + key + "' must be true or false");
    return j.at(key).get<bool>();
}

template <class T>
std::vector<T> get_int_list(const json& j, const char* key, std::vector<T> fallback, long long lo) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of integers");
    std::vector<T> out;
    for (const json& e : v) {
        if (!e.is_number_integer() || e.get<long long>() < lo)
            throw ConfigError(std::string("'") + key + "' entries must be integers >= " + std::to_string(lo));
        out.push_back(static_cast<T>(e.get<long long>()));
    }
    return out;
}

constexpr long long kMaxInt = std::numeric_limits<int>::max();

// Loop settings shared by every command that runs the estimator.
void read_run_options(const json& j, RunOptions& ro, int& warm_periods) {
    ro.tol = get_double(j, "tol", ro.tol, 0.0, true);
    ro.max_iter = static_cast<int>(get_int(j, "max_iter", ro.max_iter, 1, kMaxInt));
    ro.max_restarts = static_cast<int>(get_int(j, "max_restarts", ro.max_restarts, 0, kMaxInt));
    ro.real_mode = get_bool(j, "real_mode", ro.real_mode);
    warm_periods = static_cast<int>(get_int(j, "warm_periods", warm_periods, 0, kMaxInt));
}

BlockStructure require_structure(const json& j) {
    if (!j.contains("structure")) throw ConfigError("missing 'structure'");
    return structure_from_json(j.at("structure"));
}

void check_dims(const BlockStructure& s, Index n) {
    if (s.n() != n)
        throw DimensionError("structure block sizes must sum to the plant's channel count: they sum to " +
                             std::to_string(s.n()) + " but n = " + std::to_string(n));
}

RealMatrix real_rows(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw ConfigError(name + " must be a non-empty array of rows");
    const auto rows = static_cast<Index>(j.size());
    Index cols = -1;
    RealMatrix M;
    for (Index r = 0; r < rows; ++r) {
        const json& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || row.empty()) throw ConfigError(name + " rows must be non-empty arrays");
        if (cols < 0) {
            cols = static_cast<Index>(row.size());
            M.resize(rows, cols);
        } else if (static_cast<Index>(row.size()) != cols) {
            throw ConfigError(name + " rows have different lengths");
        }
        for (Index c = 0; c < cols; ++c) {
            const json& e = row.at(static_cast<std::size_t>(c));
            if (!e.is_number()) throw ConfigError(name + " entries must be numbers");
            M(r, c) = e.get<double>();
        }
    }
    if (!M.allFinite()) throw ConfigError(name + " entries must be finite");
    return M;
}

}  // namespace

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    try {
        json j = json::parse(is);
        if (!j.is_object()) throw ConfigError("config file " + path.string() + " must hold a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
}

StateSpaceModel plant_from_config(const json& j) {
    if (j.is_object() && j.contains("random_stable")) {
        check_keys(j, {"random_stable"}, "plant");
        const json& g = j.at("random_stable");
        check_keys(g, {"n", "n_x", "pole_radius_max", "seed"}, "plant.random_stable");
        const Index n = get_int(g, "n", 0, 1, 64);
        const Index nx = get_int(g, "n_x", 2 * n, 1, 4096);
        const double prm = get_double(g, "pole_radius_max", 0.9, 0.0, true);
        if (!(prm < 1.0)) throw ConfigError("'pole_radius_max' must be < 1");
        if (!g.contains("n")) throw ConfigError("plant.random_stable needs 'n'");
        return random_stable(n, nx, prm, get_seed(g, "seed", 0));
    }
    return model_from_json(j);
}

ComplexMatrix complex_matrix_from_json(const json& j, const std::string& name) {
    if (j.is_object()) {
        check_keys(j, {"re", "im"}, name);
        if (!j.contains("re")) throw ConfigError(name + " needs 're'");
        const RealMatrix re = real_rows(j.at("re"), name + ".re");
        ComplexMatrix M = re.cast<Complex>();
        if (j.contains("im")) {
            const RealMatrix im = real_rows(j.at("im"), name + ".im");
            if (im.rows() != re.rows() || im.cols() != re.cols())
                throw DimensionError(name + ".re and " + name + ".im differ in shape");
            M += Complex(0.0, 1.0) * im.cast<Complex>();
        }
        return M;
    }
    return real_rows(j, name).cast<Complex>();
}

EstimateConfig parse_estimate_config(const json& j) {
    check_keys(j,
               {"plant", "structure", "N", "seed", "tol", "max_iter", "max_restarts", "noise_variance", "warm_periods",
                "real_mode"},
               "estimate config");
    if (!j.contains("plant")) throw ConfigError("missing 'plant'");
    EstimateConfig cfg{plant_from_config(j.at("plant")), require_structure(j), {}, {}, 5};
    check_dims(cfg.structure, cfg.plant.n());
    cfg.run.N = get_int(j, "N", cfg.run.N, 2, 1 << 24);
    cfg.run.seed = get_seed(j, "seed", 0);
    read_run_options(j, cfg.run, cfg.warm_periods);
    cfg.noise.variance = get_double(j, "noise_variance", 0.0, 0.0, false);
    cfg.noise.seed = derive_seed(cfg.run.seed, 0x6e6f697365ULL);
    return cfg;
}

OracleConfig parse_oracle_config(const json& j) {
    check_keys(j, {"matrix", "plant", "grid", "structure", "samples", "iters", "seed"}, "oracle config");
    OracleConfig cfg{std::nullopt, std::nullopt, 1024, require_structure(j), 20000, 50, 0};
    if (j.contains("matrix") == j.contains("plant")) throw ConfigError("give exactly one of 'matrix' or 'plant'");
    if (j.contains("matrix")) {
        if (j.contains("grid")) throw ConfigError("'grid' only applies with 'plant'");
        cfg.matrix = complex_matrix_from_json(j.at("matrix"), "matrix");
        if (cfg.matrix->rows() != cfg.matrix->cols()) throw DimensionError("matrix must be square");
        check_dims(cfg.structure, cfg.matrix->rows());
    } else {
        cfg.plant = plant_from_config(j.at("plant"));
        check_dims(cfg.structure, cfg.plant->n());
        cfg.grid = get_int(j, "grid", cfg.grid, 2, 1 << 24);
    }
    cfg.samples = static_cast<std::size_t>(get_int(j, "samples", 20000, 1, std::numeric_limits<long long>::max()));
    cfg.iters = static_cast<int>(get_int(j, "iters", 50, 0, kMaxInt));
    cfg.seed = get_seed(j, "seed", 0);
    return cfg;
}

const char* to_string(CampaignKind kind) {
    switch (kind) {
        case CampaignKind::Test1: return "test1";
        case CampaignKind::Test2: return "test2";
        case CampaignKind::Noise: return "noise";
    }
    return "unknown";
}

BenchConfig parse_bench_config(const json& j) {
    if (!j.is_object()) throw ConfigError("bench config must be a JSON object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("bench config needs 'kind': \"test1\", \"test2\" or \"noise\"");
    const std::string kind = j.at("kind").get<std::string>();
    const std::set<std::string> common{"kind", "seed", "tol", "max_iter", "max_restarts", "warm_periods", "real_mode"};
    auto keys = [&](std::initializer_list<const char*> extra) {
        std::set<std::string> s = common;
        for (const char* k : extra) s.insert(k);
        return s;
    };

    BenchConfig cfg;
    cfg.seed = get_seed(j, "seed", 0);
    if (kind == "test1") {
        cfg.kind = CampaignKind::Test1;
        check_keys(j, keys({"plant", "N_list", "history_N", "curve_case"}), "test1 config");
        auto& o = cfg.test1;
        o.seed = cfg.seed;
        read_run_options(j, o.run, o.warm_periods);
        o.N_list = get_int_list<Index>(j, "N_list", o.N_list, 2);
        o.history_N = get_int(j, "history_N", 0, 0, 1 << 24);
        o.curve_case = static_cast<int>(get_int(j, "curve_case", o.curve_case, 1, 8));
        if (j.contains("plant")) {
            cfg.plant = plant_from_config(j.at("plant"));
            if (cfg.plant->n() != 3)
                throw DimensionError("test1 needs a 3x3 plant, got n = " + std::to_string(cfg.plant->n()));
        }
        if (!o.N_list.empty() && o.history_N != 0 &&
            std::find(o.N_list.begin(), o.N_list.end(), o.history_N) == o.N_list.end())
            throw ConfigError("'history_N' must be one of 'N_list'");
    } else if (kind == "test2") {
        cfg.kind = CampaignKind::Test2;
        check_keys(j, keys({"n_list", "configs", "repetitions", "tol_match", "N", "pole_radius_max"}), "test2 config");
        auto& o = cfg.test2;
        o.seed = cfg.seed;
        read_run_options(j, o.run, o.warm_periods);
        o.n_list = get_int_list<Index>(j, "n_list", o.n_list, 2);
        o.configs = get_int_list<int>(j, "configs", o.configs, 1);
        for (int c : o.configs)
            if (c > 3) throw ConfigError("'configs' entries must be 1, 2 or 3");
        o.repetitions = static_cast<int>(get_int(j, "repetitions", o.repetitions, 0, kMaxInt));
        o.tol_match = get_double(j, "tol_match", o.tol_match, 0.0, true);
        o.N = get_int(j, "N", o.N, 2, 1 << 24);
        o.pole_radius_max = get_double(j, "pole_radius_max", o.pole_radius_max, 0.0, true);
        if (!(o.pole_radius_max < 1.0)) throw ConfigError("'pole_radius_max' must be < 1");
    } else if (kind == "noise") {
        cfg.kind = CampaignKind::Noise;
        check_keys(j, keys({"plant", "structure", "variances", "repetitions", "N"}), "noise config");
        auto& o = cfg.noise;
        o.seed = cfg.seed;
        read_run_options(j, o.run, o.warm_periods);
        o.repetitions = static_cast<int>(get_int(j, "repetitions", o.repetitions, 1, kMaxInt));
        o.N = get_int(j, "N", o.N, 2, 1 << 24);
        if (j.contains("variances")) {
            const json& v = j.at("variances");
            if (!v.is_array() || v.empty()) throw ConfigError("'variances' must be a non-empty array");
            o.variances.clear();
            for (const json& e : v) {
                if (!e.is_number()) throw ConfigError("'variances' entries must be numbers");
                o.variances.push_back(e.get<double>());
            }
        }
        if (o.variances.front() != 0.0) throw ConfigError("'variances' must start with 0");
        for (std::size_t i = 0; i < o.variances.size(); ++i) {
            if (!std::isfinite(o.variances[i]) || o.variances[i] < 0.0)
                throw ConfigError("'variances' entries must be finite and >= 0");
            if (i > 0 && o.variances[i] < o.variances[i - 1])
                throw ConfigError("'variances' must be sorted ascending");
        }
        if (j.contains("plant")) cfg.plant = plant_from_config(j.at("plant"));
        if (j.contains("structure")) cfg.structure = structure_from_json(j.at("structure"));
        const Index n = cfg.plant ? cfg.plant->n() : 3;
        if (cfg.structure) check_dims(*cfg.structure, n);
    } else {
        throw ConfigError("unknown campaign kind '" + kind + "' (expected test1, test2 or noise)");
    }
    return cfg;
}

}  // namespace muprobe
