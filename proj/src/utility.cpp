#include "dualrisk/utility.hpp"

#include <cmath>
#include <limits>

#include "dualrisk/errors.hpp"
#include "dualrisk/numerics.hpp"

namespace dualrisk::util {

Utility Utility::linear() {
    Utility u;
    u.kind_ = Kind::Linear;
    return u;
}

Utility Utility::cara(double beta) {
    if (!std::isfinite(beta) || beta <= 0.0) throw invalid_utility("cara: beta must be positive");
    Utility u;
    u.kind_ = Kind::Cara;
    u.beta_ = beta;
    return u;
}

Utility Utility::generic(std::function<double(double)> u, std::function<double(double)> du,
                         std::function<double(double)> inv_du) {
    if (!u || !du || !inv_du) throw invalid_utility("generic: all three callables are required");
    if (std::abs(u(0.0)) > 1e-9) throw invalid_utility("generic: u(0) must be 0");
    // Callables are opaque: concavity and monotonicity are spot-checked on a
    // grid, not proven.
    double prev_u = u(-8.0), prev_du = du(-8.0);
    if (!std::isfinite(prev_du) || prev_du <= 0.0)
        throw invalid_utility("generic: u' must be positive and finite");
    for (int i = 1; i <= 1000; ++i) {
        double t = -8.0 + 16.0 * double(i) / 1000.0;
        double ut = u(t), dut = du(t);
        if (!std::isfinite(ut) || !std::isfinite(dut))
            throw invalid_utility("generic: non-finite value on the check grid");
        if (dut <= 0.0) throw invalid_utility("generic: u' must be positive");
        if (dut > prev_du * (1.0 + 1e-9) + 1e-12)
            throw invalid_utility("generic: u' must be non-increasing (concavity)");
        if (ut < prev_u - 1e-12) throw invalid_utility("generic: u must be increasing");
        prev_u = ut;
        prev_du = dut;
    }
    for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        double back = inv_du(du(t));
        if (!std::isfinite(back) || std::abs(back - t) > 1e-6 * (1.0 + std::abs(t)))
            throw invalid_utility("generic: inverse marginal does not invert u'");
    }
    Utility out;
    out.kind_ = Kind::Generic;
    out.u_ = std::move(u);
    out.du_ = std::move(du);
    out.inv_du_ = std::move(inv_du);
    return out;
}

double Utility::beta() const {
    if (kind_ != Kind::Cara) throw domain_error("beta(): not a CARA utility");
    return beta_;
}

double Utility::eval(double x) const {
    switch (kind_) {
        case Kind::Linear: return x;
        case Kind::Cara: return -std::expm1(-beta_ * x);
        default: return u_(x);
    }
}

double Utility::deriv(double x) const {
    switch (kind_) {
        case Kind::Linear: return 1.0;
        case Kind::Cara: return beta_ * std::exp(-beta_ * x);
        default: return du_(x);
    }
}

double Utility::deriv_at_zero() const {
    switch (kind_) {
        case Kind::Linear: return 1.0;
        case Kind::Cara: return beta_;
        default: return du_(0.0);
    }
}

double Utility::inv_marginal(double m) const {
    if (!(m > 0.0) || !std::isfinite(m)) throw domain_error("inv_marginal: m must be > 0");
    switch (kind_) {
        case Kind::Linear:
            throw domain_error("inv_marginal: linear utility has constant marginal");
        case Kind::Cara:
            return -std::log(m / beta_) / beta_;
        default: {
            double t = inv_du_(m);
            if (!std::isfinite(t)) throw domain_error("inv_marginal: m outside the range of u'");
            return t;
        }
    }
}

double Utility::forward_map_log(double alpha, double t) const {
    if (!(alpha > 0.0)) throw domain_error("forward_map: alpha must be > 0");
    switch (kind_) {
        case Kind::Linear:
            return std::log(alpha) - alpha * t;
        case Kind::Cara:
            // ln(alpha beta) - beta t + alpha(e^{-beta t} - 1)
            return std::log(alpha) + std::log(beta_) - beta_ * t + alpha * std::expm1(-beta_ * t);
        default:
            return std::log(alpha) + std::log(du_(t)) - alpha * u_(t);
    }
}

double Utility::forward_map(double alpha, double t) const {
    double l = forward_map_log(alpha, t);
    if (l > num::kOverflowExponent) return -std::numeric_limits<double>::infinity();
    return -std::exp(l);
}

double Utility::inverse_map(double alpha, double x) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw domain_error("inverse_map: alpha must be positive and finite");
    if (!(x < 0.0) || !std::isfinite(x)) throw domain_error("inverse_map: x must be negative");
    switch (kind_) {
        case Kind::Linear:
            return (std::log(alpha) - std::log(-x)) / alpha;
        case Kind::Cara: {
            // Solve alpha s e^{alpha s} = (-x/beta) e^{alpha} for s = e^{-beta Y}:
            // alpha s = W(w) with ln w kept explicit so large alpha cannot
            // overflow the W argument.
            double ln_w = std::log(-x) - std::log(beta_) + alpha;
            double ln_W;
            if (ln_w > 690.0)
                ln_W = std::log(num::lambert_w_ln(ln_w));
            else if (ln_w < -700.0)
                ln_W = ln_w; // W(w) = w(1 + O(w)) far below double resolution
            else
                ln_W = std::log(num::lambert_w(std::exp(ln_w)));
            return (std::log(alpha) - ln_W) / beta_;
        }
        default: {
            double target = std::log(-x);
            double t0 = 0.0;
            try {
                t0 = inv_du_(-x / alpha);
                if (!std::isfinite(t0)) t0 = 0.0;
            } catch (const std::exception&) {
                t0 = 0.0;
            }
            auto g = [&](double t) { return forward_map_log(alpha, t) - target; };
            // g is strictly decreasing in t.
            double lo = t0, hi = t0;
            double g0 = g(t0);
            if (g0 == 0.0) return t0;
            double step = 1.0;
            if (g0 > 0.0) {
                hi = t0 + step;
                int grow = 0;
                while (g(hi) > 0.0) {
                    lo = hi;
                    step *= 2.0;
                    hi = lo + step;
                    if (++grow > 200) throw non_convergent("inverse_map: no upper bracket");
                }
            } else {
                lo = t0 - step;
                int grow = 0;
                while (g(lo) < 0.0) {
                    hi = lo;
                    step *= 2.0;
                    lo = hi - step;
                    if (++grow > 200) throw non_convergent("inverse_map: no lower bracket");
                }
            }
            return num::find_root_continuous(g, {lo, hi}, 1e-13).root;
        }
    }
}

} // namespace dualrisk::util
