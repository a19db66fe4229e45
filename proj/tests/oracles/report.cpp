#include "report.hpp"

#include <cmath>

#include "mems/io.hpp"

namespace oracles {

std::vector<OracleReport>& ledger() {
    static std::vector<OracleReport> entries;
    return entries;
}

OracleReport check(const std::string& quantity, double oracle_value, double main_value,
                   double tolerance, bool absolute_tol) {
    OracleReport r;
    r.quantity = quantity;
    r.oracle_value = oracle_value;
    r.main_value = main_value;
    r.abs_error = std::abs(main_value - oracle_value);
    r.rel_error = r.abs_error / std::max(std::abs(oracle_value), 1e-300);
    r.tolerance = tolerance;
    r.absolute_tol = absolute_tol;
    r.pass = absolute_tol ? (r.abs_error <= tolerance) : (r.rel_error <= tolerance);
    ledger().push_back(r);
    return r;
}

std::string ledger_json() {
    mems::JsonWriter w;
    w.begin_object();
    w.begin_array("entries");
    for (const OracleReport& r : ledger()) {
        w.begin_object();
        w.field("quantity", r.quantity);
        w.field("oracle_value", r.oracle_value);
        w.field("main_value", r.main_value);
        w.field("abs_error", r.abs_error);
        w.field("rel_error", r.rel_error);
        w.field("tolerance", r.tolerance);
        w.field("tolerance_is_absolute", r.absolute_tol);
        w.field("pass", r.pass);
        w.end_object();
    }
    w.end_array();
    int passed = 0;
    for (const OracleReport& r : ledger())
        if (r.pass) ++passed;
    w.field("total", static_cast<int>(ledger().size()));
    w.field("passed", passed);
    w.end_object();
    return w.str() + "\n";
}

} // namespace oracles
