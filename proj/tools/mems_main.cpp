#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mems/cli.hpp"
#include "mems/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Bifurcation toolkit for the singular MEMS equation "
                 "-Δu = λ r^α/(1-u)² on the unit ball"};
    app.require_subcommand(1);

    struct SubArgs {
        std::string config_file;
        std::vector<std::string> sets;
        std::string N, alpha, g0, n, stretch, lambda, lambda_frac, rmax, rtest, outdir;
    };

    auto add_common = [](CLI::App* sub, SubArgs& a) {
        sub->add_option("--config", a.config_file, "config file with key = value lines");
        sub->add_option("--set", a.sets, "extra dotted-key overrides, key=value")->take_all();
        sub->add_option("--N", a.N, "dimension (branch accepts a comma list)");
        sub->add_option("--alpha", a.alpha, "profile exponent");
        sub->add_option("--g0", a.g0, "profile amplitude");
        sub->add_option("--n", a.n, "grid intervals");
        sub->add_option("--stretch", a.stretch, "grid stretch factor (>1 clusters at origin)");
        sub->add_option("--out", a.outdir, "output directory");
    };

    SubArgs args[6];
    CLI::App* formulas = app.add_subcommand("formulas", "closed-form reference quantities");
    add_common(formulas, args[0]);
    CLI::App* branch = app.add_subcommand("branch", "trace the bifurcation diagram");
    add_common(branch, args[1]);
    CLI::App* spectrum = app.add_subcommand("spectrum", "merged eigenvalues and Morse index");
    add_common(spectrum, args[2]);
    spectrum->add_option("--lambda", args[2].lambda, "parameter value (minimal solution)");
    CLI::App* limit = app.add_subcommand("limit", "entire-space limit problem");
    add_common(limit, args[3]);
    limit->add_option("--rmax", args[3].rmax, "integration radius");
    limit->add_option("--rtest", args[3].rtest, "certificate truncation radius");
    CLI::App* mp = app.add_subcommand("mp", "mountain-pass search near lambda*");
    add_common(mp, args[4]);
    mp->add_option("--lambda-frac", args[4].lambda_frac, "fraction of the computed lambda*");
    CLI::App* diag = app.add_subcommand("diag", "blow-up rescaling diagnostics");
    add_common(diag, args[5]);
    std::string diag_input = ".";
    diag->add_option("--input", diag_input, "directory holding branch outputs");

    CLI11_PARSE(app, argc, argv);

    const std::pair<CLI::App*, int> subs[] = {{formulas, 0}, {branch, 1}, {spectrum, 2},
                                              {limit, 3},    {mp, 4},     {diag, 5}};
    for (auto [sub, idx] : subs) {
        if (!sub->parsed()) continue;
        SubArgs& a = args[idx];
        mems::RunConfig cfg;
        try {
            if (!a.config_file.empty()) cfg.load_file(a.config_file);
            auto flag = [&](const std::string& key, const std::string& v) {
                if (!v.empty()) cfg.set(key, v, "--" + key);
            };
            flag("N", a.N);
            flag("alpha", a.alpha);
            flag("g0", a.g0);
            flag("grid.n", a.n);
            flag("grid.stretch", a.stretch);
            flag("lambda", a.lambda);
            flag("mp.lambda_frac", a.lambda_frac);
            flag("limit.rmax", a.rmax);
            flag("limit.rtest", a.rtest);
            flag("output.dir", a.outdir);
            for (const std::string& kv : a.sets) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    throw mems::ConfigError("--set expects key=value, got '" + kv + "'");
                }
                cfg.set(kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv);
            }
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        return mems::run(sub->get_name(), cfg, diag_input, std::cout, std::cerr);
    }
    return 2;
}
