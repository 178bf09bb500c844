#pragma once

#include <string>

#include "dualrisk/numerics.hpp"
#include "dualrisk/outcomes.hpp"

namespace dualrisk::idx {

struct IndexResult {
    num::ExtReal alpha_hat;      // sup{alpha >= 0 : E[e^{-alpha X}] <= 1}
    num::ExtReal index;          // 1/alpha_hat with 0^-1 = +inf, inf^-1 = 0
    out::Category category;
    num::ExtReal boundary_value; // E[e^{-alpha_hat X}] when alpha_hat finite positive
    bool boundary_attained;      // |boundary_value - 1| <= 1e-8
    std::string note;            // nonempty only for numerical edge diagnostics
};

/// Largest exponential-loss aversion the law tolerates:
/// category B -> +inf, C/D -> 0, A -> unique crossing of E[e^{-alpha X}] = 1
/// found by geometric bracket growth from [0, 1] and predicate bisection.
/// If the predicate still holds at alpha = 1e8 the result is +inf with a
/// diagnostic note (loss mass too small to resolve in doubles).
num::ExtReal alpha_hat(const out::Outcome& x, double tol = 1e-10);

/// Full result: alpha_hat, its reciprocal as the index, category, and the
/// boundary diagnostic E[e^{-alpha_hat X}] (strictly below 1 is possible for
/// heavy-but-admissible tails, and is reported, not treated as error).
IndexResult duality_index(const out::Outcome& x, double tol = 1e-10);

/// Structural property check on a pair of finite discrete laws:
/// positive homogeneity of the index under scaling, subadditivity on the
/// independent sum, strict increase under a mean-preserving spread, and
/// invariance under atom permutation.
struct PropertyReport {
    bool homogeneous = false;
    bool subadditive = false;
    bool spread_monotone = false;
    bool permutation_invariant = false;
    double worst_homogeneity_rel_err = 0.0;
    double subadditivity_slack = 0.0; // R(X)+R(Y)-R(X+Y), >= 0 when it holds
    double spread_increase = 0.0;     // R(spread X)-R(X), > 0 when it holds
    bool ok() const {
        return homogeneous && subadditive && spread_monotone && permutation_invariant;
    }
};

PropertyReport check_properties(const out::Outcome& x, const out::Outcome& y,
                                double tol = 1e-10);

} // namespace dualrisk::idx
