#include "mems/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mems/errors.hpp"

namespace mems {

namespace {

double parse_real(const std::string& v, const std::string& where) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a real number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, const std::string& where) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    }
}

std::vector<int> parse_int_list(const std::string& v, const std::string& where) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_int(item, where));
    }
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value, const std::string& where) {
    if (key == "N") {
        N_values = parse_int_list(value, where);
    } else if (key == "alpha") {
        alpha = parse_real(value, where);
    } else if (key == "g0") {
        g0 = parse_real(value, where);
    } else if (key == "lambda") {
        lambda = parse_real(value, where);
    } else if (key == "grid.n") {
        grid_n = parse_int(value, where);
    } else if (key == "grid.stretch") {
        grid_stretch = parse_real(value, where);
    } else if (key == "continuation.ds0") {
        ds0 = parse_real(value, where);
    } else if (key == "continuation.ds_min") {
        ds_min = parse_real(value, where);
    } else if (key == "continuation.ds_max") {
        ds_max = parse_real(value, where);
    } else if (key == "continuation.fold_tol") {
        fold_tol = parse_real(value, where);
    } else if (key == "spectrum.l_max") {
        l_max = parse_int(value, where);
    } else if (key == "spectrum.k_max") {
        k_max = parse_int(value, where);
    } else if (key == "newton.tol") {
        newton_tol = parse_real(value, where);
    } else if (key == "newton.max_iter") {
        newton_max_iter = parse_int(value, where);
    } else if (key == "newton.barrier") {
        newton_barrier = parse_real(value, where);
    } else if (key == "mp.eps") {
        mp_eps = parse_real(value, where);
    } else if (key == "mp.p") {
        mp_p = parse_real(value, where);
    } else if (key == "mp.path_nodes") {
        mp_path_nodes = parse_int(value, where);
    } else if (key == "mp.lambda_frac") {
        mp_lambda_frac = parse_real(value, where);
    } else if (key == "limit.rmax") {
        limit_rmax = parse_real(value, where);
    } else if (key == "limit.rtest") {
        limit_rtest = parse_real(value, where);
    } else if (key == "output.dir") {
        output_dir = value;
    } else if (key == "output.formats") {
        output_formats = value;
    } else {
        throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        set(key, value, path + ":" + std::to_string(lineno) + " (" + key + ")");
    }
}

void RunConfig::validate() const {
    for (int N : N_values) {
        if (N < 1) throw ConfigError("N: dimension must be >= 1, got " + std::to_string(N));
    }
    if (alpha < 0.0) throw ConfigError("alpha: must be >= 0");
    if (g0 <= 0.0) throw ConfigError("g0: must be > 0");
    if (grid_n < 16) throw ConfigError("grid.n: must be >= 16");
    if (grid_stretch < 1.0) throw ConfigError("grid.stretch: must be >= 1");
    if (ds0 <= 0.0 || ds_max < ds0 || ds_min <= 0.0)
        throw ConfigError("continuation: need 0 < ds_min, 0 < ds0 <= ds_max");
    if (fold_tol <= 0.0) throw ConfigError("continuation.fold_tol: must be > 0");
    if (l_max < 1) throw ConfigError("spectrum.l_max: must be >= 1");
    if (k_max < 2) throw ConfigError("spectrum.k_max: must be >= 2");
    if (newton_tol <= 0.0) throw ConfigError("newton.tol: must be > 0");
    if (newton_max_iter < 1) throw ConfigError("newton.max_iter: must be >= 1");
    if (newton_barrier <= 0.0 || newton_barrier >= 1.0)
        throw ConfigError("newton.barrier: must lie in (0,1)");
    if (mp_eps < 0.0 || mp_eps >= 1.0) throw ConfigError("mp.eps: must lie in [0,1)");
    if (mp_p != 0.0 && mp_p <= 1.0) throw ConfigError("mp.p: must exceed 1 (or 0 for automatic)");
    if (mp_path_nodes < 5) throw ConfigError("mp.path_nodes: must be >= 5");
    if (mp_lambda_frac <= 0.0 || mp_lambda_frac >= 1.0)
        throw ConfigError("mp.lambda_frac: must lie in (0,1)");
    if (limit_rmax < 100.0) throw ConfigError("limit.rmax: must be >= 100");
    if (limit_rtest <= 0.0 || limit_rtest > limit_rmax)
        throw ConfigError("limit.rtest: must lie in (0, limit.rmax]");
}

ProblemSpec RunConfig::spec(int N) const {
    ProblemSpec s;
    s.N = N;
    s.alpha = alpha;
    s.g0 = g0;
    return s;
}

RadialGrid RunConfig::make_grid(int N) const {
    if (grid_stretch > 1.0) return build_stretched_grid(grid_n, spec(N), grid_stretch);
    return build_grid(grid_n, spec(N));
}

ContinuationParams RunConfig::continuation() const {
    ContinuationParams p;
    p.ds0 = ds0;
    p.ds_min = ds_min;
    p.ds_max = ds_max;
    p.fold_tol = fold_tol;
    p.l_max = l_max;
    p.k_max = k_max;
    p.newton = newton();
    return p;
}

NewtonParams RunConfig::newton() const {
    NewtonParams p;
    p.tol_residual = newton_tol;
    p.max_iter = newton_max_iter;
    p.barrier_margin = newton_barrier;
    return p;
}

int branch_thread_cap() {
    const char* env = std::getenv("MEMS_BRANCH_THREADS");
    if (!env) return 1;
    try {
        const int v = std::stoi(env);
        return v >= 1 ? v : 1;
    } catch (const std::exception&) {
        return 1;
    }
}

} // namespace mems
