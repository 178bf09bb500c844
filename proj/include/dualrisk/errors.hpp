#pragma once

#include <stdexcept>
#include <string>

namespace dualrisk {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root finding received a bracket whose endpoints do not straddle the target.
struct invalid_bracket : error { using error::error; };
struct no_sign_change : error { using error::error; };

// A NaN (or a -inf where only finite values and +inf are admissible) escaped
// into a computation.
struct non_finite : error { using error::error; };

// Argument outside an operation's documented domain.
struct domain_error : error { using error::error; };

// An iteration or refinement failed to settle within its budget.
struct non_convergent : error { using error::error; };

struct invalid_distribution : error { using error::error; };
struct invalid_market : error { using error::error; };
struct invalid_utility : error { using error::error; };
struct parse_error : error { using error::error; };

} // namespace dualrisk
