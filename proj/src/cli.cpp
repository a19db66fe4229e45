#include "mems/cli.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "mems/blowup.hpp"
#include "mems/closed_forms.hpp"
#include "mems/continuation.hpp"
#include "mems/errors.hpp"
#include "mems/io.hpp"
#include "mems/limit_problem.hpp"
#include "mems/mountain_pass.hpp"
#include "mems/newton.hpp"
#include "mems/radial_operator.hpp"
#include "mems/spectrum.hpp"

namespace fs = std::filesystem;

namespace mems {

namespace {

bool wants_format(const RunConfig& cfg, const std::string& fmt) {
    return cfg.output_formats.find(fmt) != std::string::npos;
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty() && dir != ".") fs::create_directories(dir);
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

/// Minimal solution at a target λ by ramping from zero.
RadialField ramp_to_lambda(double lambda, const ProblemSpec& spec, const RadialGrid& grid,
                           const NewtonParams& np, int ramp_steps = 12) {
    RadialField u(grid.n, 0.0);
    if (lambda == 0.0) return u;
    for (int k = 1; k <= ramp_steps; ++k) {
        const double lam = lambda * k / ramp_steps;
        u = solve_at_lambda(lam, u, spec, grid, np);
    }
    return u;
}

} // namespace

int run_formulas(const RunConfig& cfg, std::ostream& out) {
    const int N = cfg.N_values.front();
    closed_forms::CriticalData data = closed_forms::critical_data(N, cfg.alpha);
    JsonWriter w;
    w.begin_object();
    w.field("N", data.N);
    w.field("alpha", data.alpha);
    w.field("q_plus", data.q_plus);
    if (data.alpha_N) w.field("alpha_N", *data.alpha_N); else w.field_null("alpha_N");
    if (data.lambda_star) w.field("lambda_star", *data.lambda_star); else w.field_null("lambda_star");
    if (data.K_singular) w.field("K_singular", *data.K_singular); else w.field_null("K_singular");
    w.field("hardy_stable", data.hardy_stable);
    if (data.lambda_star) {
        w.field("u_star_at_half", closed_forms::u_star_explicit(0.5, cfg.alpha));
    }
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int run_branch(const RunConfig& cfg, std::ostream& out) {
    ensure_dir(cfg.output_dir);
    const int n_jobs = static_cast<int>(cfg.N_values.size());
    std::vector<Branch> results(n_jobs);
    std::vector<std::string> errors(n_jobs);

    const int cap = std::max(1, std::min(branch_thread_cap(), n_jobs));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int j = next.fetch_add(1);
            if (j >= n_jobs) return;
            try {
                const int N = cfg.N_values[j];
                RadialGrid grid = cfg.make_grid(N);
                results[j] = trace_branch(cfg.spec(N), grid, cfg.continuation());
            } catch (const std::exception& e) {
                errors[j] = e.what();
            }
        }
    };
    if (cap == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < cap; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (int j = 0; j < n_jobs; ++j) {
        if (!errors[j].empty()) {
            throw ConvergenceError("branch N=" + std::to_string(cfg.N_values[j]) + ": " + errors[j],
                                   0.0, 0);
        }
    }

    JsonWriter summary;
    summary.begin_object();
    summary.begin_array("runs");
    for (int j = 0; j < n_jobs; ++j) {
        const int N = cfg.N_values[j];
        const Branch& b = results[j];
        const std::string tag = "branch_N" + std::to_string(N);
        if (wants_format(cfg, "csv")) write_file(join(cfg.output_dir, tag + ".csv"), branch_csv(b));
        if (wants_format(cfg, "json")) write_file(join(cfg.output_dir, tag + ".json"), branch_json(b));
        if (wants_format(cfg, "svg")) write_file(join(cfg.output_dir, tag + ".svg"), branch_svg(b));

        // near-singular field dumps for `diag`
        RadialGrid grid = cfg.make_grid(N);
        const std::string fdir = join(cfg.output_dir, "fields_N" + std::to_string(N));
        std::vector<size_t> dump;
        for (size_t i = 0; i < b.points.size(); ++i) {
            if (b.points[i].sup_norm >= 0.9) dump.push_back(i);
        }
        if (dump.size() > 12) dump.erase(dump.begin(), dump.end() - 12);
        if (!dump.empty()) {
            ensure_dir(fdir);
            std::string index = "point,lambda,sup_norm,file\n";
            for (size_t k = 0; k < dump.size(); ++k) {
                const BranchPoint& p = b.points[dump[k]];
                char name[32];
                std::snprintf(name, sizeof(name), "point_%04zu.csv", k);
                write_file(join(fdir, name), field_csv(grid, p.u));
                index += std::to_string(k) + "," + format_double(p.lambda) + "," +
                         format_double(p.sup_norm) + "," + name + "\n";
            }
            write_file(join(fdir, "index.csv"), index);
        }

        summary.begin_object();
        summary.field("N", N);
        summary.field("lambda_star", lambda_star(b));
        if (b.lambda_2_star_est) summary.field("lambda_2_star", *b.lambda_2_star_est);
        else summary.field_null("lambda_2_star");
        summary.field("folds", static_cast<int>(b.folds.size()));
        summary.field("termination", to_string(b.termination));
        summary.field("points", static_cast<int>(b.points.size()));
        summary.end_object();
    }
    summary.end_array();
    summary.end_object();
    out << summary.str() << "\n";
    return 0;
}

int run_spectrum(const RunConfig& cfg, std::ostream& out) {
    const int N = cfg.N_values.front();
    const ProblemSpec spec = cfg.spec(N);
    RadialGrid grid = cfg.make_grid(N);
    const double lambda = cfg.lambda < 0.0 ? 0.0 : cfg.lambda;
    RadialField u = ramp_to_lambda(lambda, spec, grid, cfg.newton());
    SpectralResult sp = morse_data(u, lambda, spec, grid, cfg.l_max, cfg.k_max);

    JsonWriter w;
    w.begin_object();
    w.field("N", N);
    w.field("alpha", cfg.alpha);
    w.field("lambda", lambda);
    w.begin_array("sectors");
    for (const SectorSpectrum& sec : sp.sectors) {
        w.begin_object();
        w.field("l", sec.l);
        w.field("multiplicity", sec.multiplicity);
        w.field("negative_count", sec.negative_count);
        w.begin_array("eigenvalues");
        for (double ev : sec.eigenvalues) w.element(ev);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.begin_array("mu");
    for (double ev : sp.merged) w.element(ev);
    w.end_array();
    w.field("mu1", sp.mu1());
    w.field("mu2", sp.mu2());
    w.field("mu2_sector", sp.mu2_sector());
    w.field("morse_index", sp.morse_index);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int run_limit(const RunConfig& cfg, std::ostream& out) {
    ensure_dir(cfg.output_dir);
    const int N = cfg.N_values.front();
    LimitProfile profile = shoot(N, cfg.alpha, cfg.limit_rmax);
    asymptotic_amplitude(profile);
    classify_stability(profile, cfg.limit_rtest);
    InstabilityResult cert = instability_certificate(profile, cfg.limit_rtest);
    const bool hardy = N >= 2 && hardy_stability_certificate(N, cfg.alpha);

    const std::string tag = "limit_N" + std::to_string(N);
    if (wants_format(cfg, "csv"))
        write_file(join(cfg.output_dir, tag + ".csv"), limit_profile_csv(profile));
    const std::string cert_json = limit_certificate_json(profile, cert, hardy);
    if (wants_format(cfg, "json")) write_file(join(cfg.output_dir, tag + ".json"), cert_json);
    out << cert_json;
    return 0;
}

int run_mp(const RunConfig& cfg, std::ostream& out) {
    ensure_dir(cfg.output_dir);
    const int N = cfg.N_values.front();
    const ProblemSpec spec = cfg.spec(N);
    RadialGrid grid = cfg.make_grid(N);

    Branch b = trace_branch(spec, grid, cfg.continuation());
    const double lam_star = lambda_star(b);
    const double lambda = cfg.mp_lambda_frac * lam_star;
    RadialField u_lam = ramp_to_lambda(lambda, spec, grid, cfg.newton());

    RegularizationParams reg;
    reg.p = cfg.mp_p > 0.0 ? cfg.mp_p : default_growth_exponent(N);
    reg.eps = cfg.mp_eps > 0.0 ? cfg.mp_eps
                               : choose_epsilon(lambda, u_lam, reg.p, spec, grid);
    PathParams pp;
    pp.nodes = cfg.mp_path_nodes;

    MountainPassResult res = mp_search(lambda, u_lam, reg, spec, grid, pp);
    const double J_min = energy(u_lam, lambda, reg, spec, grid);

    write_file(join(cfg.output_dir, "mp_critical_point.csv"), field_csv(grid, res.critical_point));
    SpectralResult sp = morse_data(res.critical_point, lambda, spec, grid, cfg.l_max, cfg.k_max);

    JsonWriter w;
    w.begin_object();
    w.field("N", N);
    w.field("alpha", cfg.alpha);
    w.field("lambda_star", lam_star);
    w.field("lambda", lambda);
    w.field("eps", reg.eps);
    w.field("p", reg.p);
    w.field("level", res.level);
    w.field("energy_minimal", J_min);
    w.field("grad_norm", res.grad_norm);
    w.field("residual_unregularized", res.residual_unreg);
    w.field("is_solution", res.is_solution);
    w.field("mu1", sp.mu1());
    w.field("mu2", sp.mu2());
    w.field("morse_index", sp.morse_index);
    w.field("iterations", res.iterations);
    w.end_object();
    const std::string js = w.str() + "\n";
    write_file(join(cfg.output_dir, "mp_level.json"), js);
    out << js;
    return 0;
}

int run_diag(const RunConfig& cfg, const std::string& input_dir, std::ostream& out) {
    ensure_dir(cfg.output_dir);
    const int N = cfg.N_values.front();
    const ProblemSpec spec = cfg.spec(N);
    const std::string fdir = join(input_dir, "fields_N" + std::to_string(N));
    std::ifstream index(join(fdir, "index.csv"));
    if (!index) {
        throw ConfigError("diag: no field dumps found under " + fdir +
                          " (run `branch` with the same output dir first)");
    }

    LimitProfile limit = shoot(N, cfg.alpha, std::max(100.0, cfg.limit_rmax));
    asymptotic_amplitude(limit);

    std::string line;
    std::getline(index, line); // header
    JsonWriter w;
    w.begin_object();
    w.field("N", N);
    w.field("alpha", cfg.alpha);
    w.begin_array("points");
    std::vector<double> dists;
    bool monotone = true;
    double prev_dist = -1.0;
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        // columns: point,lambda,sup_norm,file
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) cols.push_back(item);
        if (cols.size() != 4) throw ConfigError("diag: malformed index line: " + line);
        const double lambda = std::stod(cols[1]);
        std::ifstream fcsv(join(fdir, cols[3]));
        if (!fcsv) throw ConfigError("diag: missing field file " + cols[3]);
        std::getline(fcsv, line); // header
        std::vector<double> rr, uu;
        while (std::getline(fcsv, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            rr.push_back(std::stod(line.substr(0, comma)));
            uu.push_back(std::stod(line.substr(comma + 1)));
        }
        if (rr.size() < 17) throw ConfigError("diag: field file too short: " + cols[3]);
        // rebuild the nodal field (drop the boundary row)
        RadialField u(uu.begin(), uu.end() - 1);
        RadialGrid grid;
        grid.n = static_cast<int>(u.size());
        grid.h = 1.0 / grid.n;
        grid.r = rr;

        RescaledProfile resc;
        try {
            resc = classify_and_rescale(u, lambda, spec, grid);
        } catch (const DomainError&) {
            continue; // not in the blow-up regime
        }
        const double R_cmp = std::min(5.0, resc.y_max());
        const double dist = compare_to_limit(resc, limit, R_cmp);
        const double cbound = pointwise_bound_constant(u, lambda, spec, grid);
        if (prev_dist >= 0.0 && dist >= prev_dist) monotone = false;
        prev_dist = dist;
        dists.push_back(dist);

        std::string rcsv = "y,U\n";
        for (size_t i = 0; i < resc.y.size(); ++i) {
            rcsv += format_double(resc.y[i]) + "," + format_double(resc.U[i]) + "\n";
        }
        write_file(join(cfg.output_dir, "rescaled_" + cols[0] + ".csv"), rcsv);

        w.begin_object();
        w.field("point", std::stoi(cols[0]));
        w.field("lambda", lambda);
        w.field("eps", resc.eps_n);
        w.field("scale", resc.scale);
        w.field("case", to_string(resc.case_tag));
        w.field("R_compare", R_cmp);
        w.field("sup_distance", dist);
        w.field("bound_constant", cbound);
        w.end_object();
    }
    w.end_array();
    w.field("K_hat", limit.K_hat);
    w.field("distance_monotone_decreasing", monotone);
    w.end_object();
    const std::string js = w.str() + "\n";
    write_file(join(cfg.output_dir, "diag_summary.json"), js);
    out << js;
    return 0;
}

int run(const std::string& subcommand, const RunConfig& cfg, const std::string& input_dir,
        std::ostream& out, std::ostream& err) {
    auto fail_json = [&](const std::string& type, const std::string& what) {
        JsonWriter w;
        w.begin_object();
        w.field("error", type);
        w.field("message", what);
        w.end_object();
        out << w.str() << "\n";
    };
    try {
        cfg.validate();
        if (subcommand == "formulas") return run_formulas(cfg, out);
        if (subcommand == "branch") return run_branch(cfg, out);
        if (subcommand == "spectrum") return run_spectrum(cfg, out);
        if (subcommand == "limit") return run_limit(cfg, out);
        if (subcommand == "mp") return run_mp(cfg, out);
        if (subcommand == "diag") return run_diag(cfg, input_dir, out);
        err << "unknown subcommand: " << subcommand << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        fail_json("convergence_failure", e.what());
        return 3;
    } catch (const SingularStateError& e) {
        fail_json("singular_state", e.what());
        return 3;
    } catch (const std::exception& e) {
        fail_json("runtime_error", e.what());
        return 3;
    }
}

} // namespace mems
