#include "mems/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mems {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {
std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}
} // namespace

void JsonWriter::comma() {
    if (!first_in_scope_.empty()) {
        if (!first_in_scope_.back()) out_ += ",";
        first_in_scope_.back() = false;
    }
}

void JsonWriter::key_prefix(const std::string& key) {
    comma();
    if (!key.empty()) out_ += "\"" + json_escape(key) + "\":";
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += "{";
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += "}";
    first_in_scope_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& key) {
    key_prefix(key);
    out_ += "[";
    first_in_scope_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += "]";
    first_in_scope_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, double value) {
    key_prefix(key);
    if (std::isfinite(value)) {
        out_ += format_double(value);
    } else {
        out_ += "null";
    }
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, int value) {
    key_prefix(key);
    out_ += std::to_string(value);
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, bool value) {
    key_prefix(key);
    out_ += value ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& key, const std::string& value) {
    key_prefix(key);
    out_ += "\"" + json_escape(value) + "\"";
    return *this;
}

JsonWriter& JsonWriter::field_null(const std::string& key) {
    key_prefix(key);
    out_ += "null";
    return *this;
}

JsonWriter& JsonWriter::element(double value) {
    comma();
    out_ += std::isfinite(value) ? format_double(value) : "null";
    return *this;
}

std::string branch_csv(const Branch& branch) {
    std::string out = "s,lambda,u0,sup_norm,mu1,mu2,morse_index\n";
    for (const BranchPoint& p : branch.points) {
        out += format_double(p.s) + "," + format_double(p.lambda) + "," + format_double(p.u0) +
               "," + format_double(p.sup_norm) + "," + format_double(p.mu1) + "," +
               format_double(p.mu2) + "," + std::to_string(p.morse_index) + "\n";
    }
    return out;
}

std::string branch_json(const Branch& branch) {
    JsonWriter w;
    w.begin_object();
    const double lam_star =
        branch.folds.empty() ? branch.sup_lambda() : branch.folds.front().lambda;
    w.field("lambda_star", lam_star);
    if (branch.lambda_star_is_lower_bound) w.field("lambda_star_is_lower_bound", true);
    if (branch.lambda_2_star_est) {
        w.field("lambda_2_star", *branch.lambda_2_star_est);
    } else {
        w.field_null("lambda_2_star");
    }
    if (branch.lambda_2_star_ambiguous) w.field("lambda_2_star_ambiguous", true);
    w.begin_array("folds");
    for (const Fold& f : branch.folds) {
        w.begin_object();
        w.field("index", f.index);
        w.field("s", f.s);
        w.field("lambda", f.lambda);
        w.field("u0", f.u0);
        w.field("mu_crossing", f.mu_crossing);
        w.end_object();
    }
    w.end_array();
    w.field("termination", to_string(branch.termination));
    w.field("points", static_cast<int>(branch.points.size()));
    if (!branch.diagnostics.empty()) w.field("diagnostics", branch.diagnostics);
    w.end_object();
    return w.str() + "\n";
}

namespace {

struct Mapper {
    double xmin, xmax, ymin, ymax;
    static constexpr double W = 800, H = 600, ML = 70, MR = 20, MT = 20, MB = 50;
    double px(double x) const { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); }
    double py(double y) const { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); }
};

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

std::string branch_svg(const Branch& branch) {
    double lmax = 1e-12, umax = 1e-12;
    for (const BranchPoint& p : branch.points) {
        lmax = std::max(lmax, p.lambda);
        umax = std::max(umax, p.u0);
    }
    Mapper m{0.0, lmax * 1.05, 0.0, std::max(1.0, umax * 1.05)};

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
    s += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    // axes
    s += "<line x1=\"" + svg_num(m.px(m.xmin)) + "\" y1=\"" + svg_num(m.py(m.ymin)) + "\" x2=\"" +
         svg_num(m.px(m.xmax)) + "\" y2=\"" + svg_num(m.py(m.ymin)) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<line x1=\"" + svg_num(m.px(m.xmin)) + "\" y1=\"" + svg_num(m.py(m.ymin)) + "\" x2=\"" +
         svg_num(m.px(m.xmin)) + "\" y2=\"" + svg_num(m.py(m.ymax)) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = m.xmin + (m.xmax - m.xmin) * t / 5;
        const double yv = m.ymin + (m.ymax - m.ymin) * t / 5;
        s += "<line x1=\"" + svg_num(m.px(xv)) + "\" y1=\"" + svg_num(m.py(m.ymin)) + "\" x2=\"" +
             svg_num(m.px(xv)) + "\" y2=\"" + svg_num(m.py(m.ymin) + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + svg_num(m.px(xv)) + "\" y=\"" + svg_num(m.py(m.ymin) + 20) +
             "\" font-size=\"12\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
        s += "<line x1=\"" + svg_num(m.px(m.xmin) - 5) + "\" y1=\"" + svg_num(m.py(yv)) +
             "\" x2=\"" + svg_num(m.px(m.xmin)) + "\" y2=\"" + svg_num(m.py(yv)) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + svg_num(m.px(m.xmin) - 10) + "\" y=\"" + svg_num(m.py(yv) + 4) +
             "\" font-size=\"12\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
    }
    s += "<text x=\"" + svg_num(0.5 * (m.px(m.xmin) + m.px(m.xmax))) + "\" y=\"590\" "
         "font-size=\"14\" text-anchor=\"middle\">lambda</text>\n";
    s += "<text x=\"15\" y=\"" + svg_num(0.5 * (m.py(m.ymin) + m.py(m.ymax))) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
         svg_num(0.5 * (m.py(m.ymin) + m.py(m.ymax))) + ")\">u(0)</text>\n";

    // polyline split into stability runs: solid μ₁>0, dashed μ₁<0
    auto emit_run = [&](const std::vector<std::pair<double, double>>& pts, bool stable) {
        if (pts.size() < 2) return;
        std::string poly = "<polyline fill=\"none\" stroke=\"" +
                           std::string(stable ? "#1f4e9c" : "#c03020") + "\" stroke-width=\"1.5\"";
        if (!stable) poly += " stroke-dasharray=\"6,4\"";
        poly += " points=\"";
        for (auto& [x, y] : pts) poly += svg_num(m.px(x)) + "," + svg_num(m.py(y)) + " ";
        poly += "\"/>\n";
        s += poly;
    };
    std::vector<std::pair<double, double>> run;
    bool run_stable = true;
    for (size_t i = 0; i < branch.points.size(); ++i) {
        const BranchPoint& p = branch.points[i];
        const bool stable = p.mu1 > 0.0;
        if (run.empty()) {
            run_stable = stable;
        } else if (stable != run_stable) {
            run.emplace_back(p.lambda, p.u0); // close the run at the switch point
            emit_run(run, run_stable);
            run.clear();
            run_stable = stable;
        }
        run.emplace_back(p.lambda, p.u0);
    }
    emit_run(run, run_stable);

    for (const Fold& f : branch.folds) {
        s += "<circle cx=\"" + svg_num(m.px(f.lambda)) + "\" cy=\"" + svg_num(m.py(f.u0)) +
             "\" r=\"5\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    }
    // legend
    s += "<line x1=\"560\" y1=\"40\" x2=\"610\" y2=\"40\" stroke=\"#1f4e9c\" "
         "stroke-width=\"1.5\"/><text x=\"618\" y=\"44\" font-size=\"12\">mu1 &gt; 0</text>\n";
    s += "<line x1=\"560\" y1=\"60\" x2=\"610\" y2=\"60\" stroke=\"#c03020\" "
         "stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/><text x=\"618\" y=\"64\" "
         "font-size=\"12\">mu1 &lt; 0</text>\n";
    s += "<circle cx=\"585\" cy=\"80\" r=\"5\" fill=\"none\" stroke=\"black\" "
         "stroke-width=\"1.5\"/><text x=\"618\" y=\"84\" font-size=\"12\">fold</text>\n";
    s += "</svg>\n";
    return s;
}

std::string limit_profile_csv(const LimitProfile& profile) {
    const double expo = (2.0 + profile.alpha) / 3.0;
    std::string out = "r,U,U_over_r_pow\n";
    for (size_t j = 0; j < profile.r.size(); ++j) {
        const double rr = profile.r[j];
        const double ratio = rr > 0.0 ? profile.U[j] / std::pow(rr, expo) : 0.0;
        out += format_double(rr) + "," + format_double(profile.U[j]) + "," +
               format_double(ratio) + "\n";
    }
    return out;
}

std::string limit_certificate_json(const LimitProfile& profile, const InstabilityResult& cert,
                                   bool hardy) {
    JsonWriter w;
    w.begin_object();
    w.field("N", profile.N);
    w.field("alpha", profile.alpha);
    w.field("R_max", profile.R_max);
    w.field("K_hat", profile.K_hat);
    w.field("mu1_hat", cert.mu1_hat);
    w.field("R_test", cert.R_test);
    w.field("certificate", to_string(profile.certificate));
    w.field("hardy_stable", hardy);
    w.end_object();
    return w.str() + "\n";
}

std::string field_csv(const RadialGrid& grid, const RadialField& u) {
    std::string out = "r,u\n";
    for (int i = 0; i < grid.n; ++i) {
        out += format_double(grid.r[i]) + "," + format_double(u[i]) + "\n";
    }
    out += format_double(1.0) + "," + format_double(0.0) + "\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

} // namespace mems
