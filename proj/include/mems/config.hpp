#pragma once

#include <string>
#include <vector>

#include "mems/continuation.hpp"
#include "mems/mountain_pass.hpp"
#include "mems/types.hpp"

namespace mems {

/// Flat dotted-key run configuration.  A config file holds `key = value`
/// lines (# comments allowed); command-line flags override file entries.
/// Unknown keys and out-of-range values are rejected with a line/field
/// diagnostic.
struct RunConfig {
    // problem
    std::vector<int> N_values = {2}; // `branch` may sweep several dimensions
    double alpha = 0.0;
    double g0 = 1.0;

    // grid
    int grid_n = 400;
    double grid_stretch = 1.0; // > 1 clusters nodes at the origin

    // continuation
    double ds0 = 0.02;
    double ds_min = 1e-9;
    double ds_max = 0.1;
    double fold_tol = 1e-3;

    // spectrum
    int l_max = 2;
    int k_max = 3;

    // newton
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    double newton_barrier = 1e-8;

    // mountain pass
    double mp_eps = 0.0; // 0 = automatic (1 - sup u_lambda)/4
    double mp_p = 0.0;   // 0 = dimension default
    int mp_path_nodes = 21;
    double mp_lambda_frac = 0.98;

    // limit problem
    double limit_rmax = 1e4;
    double limit_rtest = 100.0;

    // output
    std::string output_dir = ".";
    std::string output_formats = "csv,json,svg";
    double lambda = -1.0; // `spectrum` subcommand: solve point (λ < 0 means 0)

    /// Apply one dotted-key assignment; `where` names the source for errors.
    void set(const std::string& key, const std::string& value, const std::string& where);

    /// Parse a config file into this struct.
    void load_file(const std::string& path);

    void validate() const;

    ProblemSpec spec(int N) const;
    RadialGrid make_grid(int N) const;
    ContinuationParams continuation() const;
    NewtonParams newton() const;
};

/// Parallelism cap for parameter sweeps, from MEMS_BRANCH_THREADS (>=1);
/// defaults to 1 when unset or malformed.
int branch_thread_cap();

} // namespace mems
