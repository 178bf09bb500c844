#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dualrisk/errors.hpp"

namespace dualrisk::num {

/// Exponents beyond this many natural-log units are treated as overflow and
/// collapse to +infinity instead of producing IEEE garbage.
inline constexpr double kOverflowExponent = 700.0;

/// Extended real line: finite doubles plus +infinity. NaN and -infinity are
/// rejected at the boundary so they can never propagate.
class ExtReal {
  public:
    ExtReal() = default;

    static ExtReal of(double x) {
        if (std::isnan(x) || x == -std::numeric_limits<double>::infinity())
            throw non_finite("ExtReal: NaN or -inf");
        return ExtReal(x);
    }
    static ExtReal inf() { return ExtReal(std::numeric_limits<double>::infinity()); }

    bool finite() const { return std::isfinite(v_); }
    bool is_inf() const { return std::isinf(v_); }

    /// Raw value; +infinity is returned as the IEEE infinity.
    double get() const { return v_; }

    /// Reciprocal with the conventions 1/0 = +inf and 1/+inf = 0.
    /// Only defined for nonnegative values.
    ExtReal recip() const {
        if (v_ < 0.0) throw domain_error("ExtReal::recip: negative value");
        if (v_ == 0.0) return inf();
        if (is_inf()) return ExtReal(0.0);
        return ExtReal(1.0 / v_);
    }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if (a.is_inf() || b.is_inf()) return inf();
        return of(a.v_ + b.v_);
    }
    friend ExtReal operator*(double k, ExtReal a) {
        if (std::isnan(k)) throw non_finite("ExtReal: NaN scale");
        if (a.is_inf()) {
            if (k < 0.0) throw domain_error("ExtReal: negative * inf");
            if (k == 0.0) return ExtReal(0.0);
            return inf();
        }
        return of(k * a.v_);
    }
    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
    friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
    friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
    friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
    friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }

  private:
    explicit ExtReal(double v) : v_(v) {}
    double v_ = 0.0;
};

/// exp with the overflow convention above: exponent > 700 yields +inf,
/// exponent = -inf yields 0, NaN throws.
inline ExtReal exp_guarded(double e) {
    if (std::isnan(e)) throw non_finite("exp_guarded: NaN exponent");
    if (e > kOverflowExponent) return ExtReal::inf();
    return ExtReal::of(std::exp(e));
}

struct Bracket {
    double lo;
    double hi;
};

struct RootResult {
    double root;        // midpoint of the final bracket
    double last_true;   // largest probe where the predicate held
    double last_false;  // smallest probe where it failed
    int iterations;
    bool degenerate;    // input bracket already narrower than tol
};

/// Bisection on a monotone predicate: pred is true on [lo, s) and false on
/// (s, hi] for some switch point s. The predicate may jump from true straight
/// to "+inf territory"; only its boolean value is consulted. Deterministic
/// probe order.
RootResult find_root_monotone(const std::function<bool(double)>& pred, Bracket b,
                              double tol = 1e-10);

struct ContinuousRootResult {
    double root;
    double f_root;
    int iterations;
};

/// Bracketed root of a continuous function: bisection with a secant step taken
/// whenever it lands safely inside the current bracket. Infinite f values keep
/// their sign and remain usable for bracketing; NaN throws non_finite.
ContinuousRootResult find_root_continuous(const std::function<double(double)>& f,
                                          Bracket b, double tol = 1e-10);

/// Principal-branch Lambert W on [0, inf): the unique w >= 0 with w e^w = z.
double lambert_w(double z);

/// W for arguments given in log space (solves w + ln w = ln_z); exact for
/// huge z where forming z itself would overflow.
double lambert_w_ln(double ln_z);

/// Quadrature in standard-normal coordinates: E[g(Z)] ~ sum w_i g(z_i) with
/// sum w_i = 1 and nodes symmetric about 0.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    static const QuadratureRule& gauss_hermite(int n);
};

/// sum w_i g(z_i). Any node evaluating to +inf makes the result +inf;
/// NaN or -inf throws non_finite.
ExtReal gauss_expectation(const std::function<double(double)>& g,
                          const QuadratureRule& rule);

struct CheckedExpectation {
    ExtReal value;       // at the doubled rule
    bool converged;
    double rel_change;
};

/// Refinement hook: evaluates at n and 2n nodes and reports agreement.
CheckedExpectation gauss_expectation_checked(const std::function<double(double)>& g,
                                             int nodes, double rel_tol = 1e-9);

/// sum_{n>=1} n^{-p} e^{-eps n}.
///
/// Returns +inf when eps < 0, or when eps == 0 with p <= 1 (divergent
/// p-series). Direct summation with a two-sided tail bound when eps >= 1e-3
/// or p >= 6; Euler-Maclaurin with an exact tail integral otherwise, so
/// evaluations stay O(thousands of terms) even for eps ~ 1e-10. Accepts
/// p > -2 (mildly growing numerators arise from first moments of power
/// tails).
ExtReal exp_power_tail_sum(double p, double eps);

/// Gauss-Legendre integral of f over [a, b] using fixed 32-point panels.
/// npanels subdivides [a, b] evenly; accuracy is spectral in the panel width
/// for smooth f.
double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int npanels);

} // namespace dualrisk::num
