#pragma once

#include <string>
#include <vector>

#include "mems/branch.hpp"
#include "mems/limit_problem.hpp"
#include "mems/types.hpp"

namespace mems {

/// Bit-stable output formats.  All floating values are printed with 17
/// significant digits and no locale dependence; data files carry no
/// timestamps, so identical runs produce byte-identical artifacts.

/// %.17g rendering of a double (shortest unambiguous form is NOT used; the
/// digit count is fixed for diffability).
std::string format_double(double x);

/// Minimal ordered JSON emitter.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key = "");
    JsonWriter& end_array();
    JsonWriter& field(const std::string& key, double value);
    JsonWriter& field(const std::string& key, int value);
    JsonWriter& field(const std::string& key, bool value);
    JsonWriter& field(const std::string& key, const std::string& value);
    JsonWriter& field(const std::string& key, const char* value) {
        return field(key, std::string(value));
    }
    JsonWriter& field_null(const std::string& key);
    JsonWriter& element(double value);
    std::string str() const { return out_; }

  private:
    void comma();
    void key_prefix(const std::string& key);
    std::string out_;
    std::vector<bool> first_in_scope_;
};

/// Branch CSV with the stable schema `s,lambda,u0,sup_norm,mu1,mu2,morse_index`.
std::string branch_csv(const Branch& branch);

/// Branch summary JSON: {lambda_star, lambda_2_star, folds, termination, ...}.
std::string branch_json(const Branch& branch);

/// Self-contained SVG of the bifurcation diagram: u(0) against λ, solid
/// where μ₁ > 0 and dashed where μ₁ < 0, with circled fold markers.
std::string branch_svg(const Branch& branch);

/// Limit-profile CSV: r, U, U/r^{(2+α)/3}.
std::string limit_profile_csv(const LimitProfile& profile);

/// Certificate JSON for the limit problem.
std::string limit_certificate_json(const LimitProfile& profile,
                                   const InstabilityResult& cert, bool hardy);

/// Radial field CSV: r, u rows (used for per-point dumps and the mp output).
std::string field_csv(const RadialGrid& grid, const RadialField& u);

void write_file(const std::string& path, const std::string& content);

} // namespace mems
