#pragma once

#include <string>

#include "json.hpp"

namespace freeprob {

/// Outcome of a relation sweep: the largest violation seen, the witness that
/// achieved it, and how many relations were checked.
struct ViolationReport {
    double max_abs_violation = 0.0;
    std::string witness;
    long relations_checked = 0;
    int degree = 0;
    bool exact_mode = false;

    template <class DescribeFn>
    void record(double v, DescribeFn&& describe) {
        ++relations_checked;
        if (v > max_abs_violation) {
            max_abs_violation = v;
            witness = describe();
        }
    }

    bool ok(double tol) const { return max_abs_violation <= tol; }

    /// Exact mode demands literal zero; float mode uses 1e-9.
    double default_tolerance() const { return exact_mode ? 0.0 : 1e-9; }

    nlohmann::json to_json() const {
        return nlohmann::json{{"max_abs_violation", max_abs_violation},
                              {"witness_word", witness},
                              {"relations_checked", relations_checked},
                              {"degree", degree},
                              {"exact_mode", exact_mode}};
    }
};

} // namespace freeprob
