#pragma once

// Nested-operator (Neumann) series y = sum_k (-1)^k I^beta (a I^beta)^k b,
// evaluated by repeated discrete operator application. Used as the
// independent reference for the single-integral series solver.

#include <cstddef>
#include <vector>

#include "fracrep/coefficient.hpp"
#include "fracrep/fracops.hpp"
#include "fracrep/grid.hpp"

namespace fracrep {

/// a(t) sampled on the grid.
[[nodiscard]] inline GridFunction sample_coefficient(const AnalyticCoefficient& a, const Grid& g) {
    return sample([&](double t) { return a.value(t); }, g);
}

/// One application of (I^beta a): returns I^beta (a * prev).
[[nodiscard]] inline GridFunction nested_term(const GridFunction& prev, const GridFunction& a_samples,
                                              double beta) {
    GridFunction product = prev;
    for (std::size_t j = 0; j < product.size(); ++j) {
        product[j] *= a_samples[j];
    }
    return rl_integral(product, beta);
}

[[nodiscard]] inline GridFunction nested_term(const GridFunction& prev, const AnalyticCoefficient& a,
                                              double beta) {
    return nested_term(prev, sample_coefficient(a, prev.grid()), beta);
}

struct NeumannResult {
    GridFunction solution;
    int k_used = 0;
    std::vector<double> term_norms;  // max-norm of term k, k = 0..computed
    bool converged = true;           // false when the K cap was hit before tol
    bool stalled = false;            // term norms non-decreasing three times in a row
};

/// Partial sums of the nested series. term_0 = I^beta b and
/// term_k = I^beta (a term_{k-1}); stops at the first term below tol (which is
/// not added) or after term K.
[[nodiscard]] inline NeumannResult neumann_solve(const AnalyticCoefficient& a, const GridFunction& b,
                                                 double beta, int max_terms, double tol) {
    if (max_terms < 1) {
        throw Error(ErrorCode::InvalidArgument, "neumann_solve needs K >= 1");
    }
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "neumann_solve needs tol > 0");
    }
    const GridFunction a_samples = sample_coefficient(a, b.grid());
    GridFunction term = rl_integral(b, beta);
    NeumannResult result{term, 0, {term.max_norm()}, true, false};
    int rises = 0;
    bool done = false;
    for (int k = 1; k <= max_terms; ++k) {
        term = nested_term(term, a_samples, beta);
        const double norm = term.max_norm();
        result.term_norms.push_back(norm);
        if (norm < tol) {
            done = true;
            break;
        }
        rises = norm >= result.term_norms[static_cast<std::size_t>(k - 1)] ? rises + 1 : 0;
        if (rises >= 3) {
            result.stalled = true;
        }
        if (k % 2 == 1) {
            result.solution -= term;
        } else {
            result.solution += term;
        }
        result.k_used = k;
    }
    result.converged = done && !result.stalled;
    return result;
}

}  // namespace fracrep
