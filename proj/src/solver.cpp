#include "dualrisk/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "dualrisk/errors.hpp"

namespace dualrisk::slv {

namespace {

constexpr double kLn10 = 2.302585092994045684;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// -E[rho (u')^{-1}(lambda rho)] for lambda above the critical multiplier;
// the well-posedness threshold is the limit from above.
double surplus_at(const util::Utility& u, const mkt::Market& m, double lambda) {
    return -m.expect_rho([&](double rho) { return u.inv_marginal(lambda * rho); }).get();
}

num::ExtReal y_hat_strictly_concave(const util::Utility& u, const mkt::Market& m) {
    // lambda_hat = sup{lambda > 0 : E[u((u')^{-1}(lambda rho))] > 0}; the
    // expectation is strictly decreasing in lambda.
    const num::ExtReal zero = num::ExtReal::of(0.0);
    auto pred = [&](double lambda) {
        return m.expect([&](double rho) { return u.eval(u.inv_marginal(lambda * rho)); }) > zero;
    };
    double lo = 1e-12;
    if (!pred(lo)) throw non_convergent("y_hat: E[u((u')^{-1}(lambda rho))] <= 0 at lambda = 1e-12");
    double hi = 1.0;
    while (pred(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) throw non_convergent("y_hat: no finite critical multiplier below 1e8");
    }
    num::RootResult r = num::find_root_monotone(pred, {lo, hi}, 1e-13 * std::max(1.0, hi));
    double lambda_hat = r.root;
    // One Richardson step toward the one-sided limit: the two perturbed
    // evaluations differ only through ln(1+delta) terms, so the step is
    // first-order exact.
    double w1 = surplus_at(u, m, lambda_hat * (1.0 + 1e-8));
    double w2 = surplus_at(u, m, lambda_hat * (1.0 + 1e-7));
    return num::ExtReal::of(std::max(0.0, (10.0 * w1 - w2) / 9.0));
}

} // namespace

const char* feasibility_name(Feasibility f) {
    switch (f) {
        case Feasibility::RisklessBenchmark: return "riskless_benchmark";
        case Feasibility::Solved: return "solved";
        default: return "infeasible";
    }
}

num::ExtReal y_hat(const util::Utility& u, const mkt::Market& m) {
    if (u.kind() == util::Utility::Kind::Linear) {
        double e = m.ess_inf();
        if (e <= 0.0) return num::ExtReal::inf();
        return num::ExtReal::of(1.0 / e);
    }
    if (u.kind() == util::Utility::Kind::Cara && m.kind() == mkt::Market::Kind::Lognormal)
        return num::ExtReal::of(m.sigma2() / (2.0 * u.beta()));
    return y_hat_strictly_concave(u, m);
}

InnerSolution solve_inner(const util::Utility& u, const mkt::Market& m, double alpha, double y,
                          double tol) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw domain_error("solve_inner: alpha must be positive and finite");
    if (!(y > 0.0) || !std::isfinite(y)) throw domain_error("solve_inner: y must be positive");
    if (!(tol > 0.0)) throw domain_error("solve_inner: tol must be positive");

    // Budget mismatch in t = ln(-lambda) coordinates; strictly decreasing in
    // t because the payoff I_alpha(lambda rho) rises as lambda -> 0-.
    auto budget_gap = [&](double t) {
        double lambda = -std::exp(t);
        return m.expect_rho([&](double rho) { return u.inverse_map(alpha, lambda * rho); }).get() +
               y;
    };
    double t_lo = -18.42, t_hi = 0.0;
    while (budget_gap(t_lo) <= 0.0) {
        t_lo -= kLn10;
        if (t_lo < -700.0)
            throw invalid_bracket("solve_inner: no multiplier bracket toward lambda = 0; "
                                  "the budget may be unattainable (y at or beyond y_hat)");
    }
    while (budget_gap(t_hi) >= 0.0) {
        t_hi += kLn10;
        if (t_hi > 700.0)
            throw invalid_bracket("solve_inner: no multiplier bracket for large -lambda; "
                                  "integrability of rho I_alpha(lambda rho) may fail");
    }
    num::ContinuousRootResult root = num::find_root_continuous(budget_gap, {t_lo, t_hi}, 1e-12);
    double lambda = -std::exp(root.root);

    InnerSolution sol;
    sol.alpha = alpha;
    sol.lambda = lambda;
    sol.budget_residual = std::abs(root.f_root);
    util::Utility u_copy = u;
    sol.payoff = [u_copy, alpha, lambda](double rho) {
        return u_copy.inverse_map(alpha, lambda * rho);
    };

    num::ExtReal phi_val = m.expect([&](double rho) {
        double e = -alpha * u.eval(sol.payoff(rho));
        if (e > num::kOverflowExponent) return std::numeric_limits<double>::infinity();
        return std::exp(e);
    });
    sol.phi = phi_val.is_inf() ? std::numeric_limits<double>::infinity() : phi_val.get();

    // First-order condition checked in log space: ln(-forward(Y)) vs
    // ln(-lambda rho); absolute log error ~ relative linear error.
    double worst = 0.0;
    auto foc_at = [&](double rho) {
        double yv = sol.payoff(rho);
        double lhs = u.forward_map_log(alpha, yv);
        double rhs = std::log(-lambda) + std::log(rho);
        worst = std::max(worst, std::abs(lhs - rhs));
    };
    if (m.kind() == mkt::Market::Kind::Discrete) {
        for (const out::Atom& a : m.atoms()) foc_at(a.value);
    } else {
        for (int i = 0; i <= 32; ++i) foc_at(m.rho_of_z(-4.0 + 0.25 * i));
    }
    sol.foc_residual = worst;
    return sol;
}

double phi(const util::Utility& u, const mkt::Market& m, double alpha, double y, double tol) {
    if (alpha == 0.0) return 1.0; // no risk aversion: every budget-feasible payoff is acceptable
    return solve_inner(u, m, alpha, y, tol).phi;
}

OuterSolution solve_outer(const util::Utility& u, const mkt::Market& m, double y, double tol) {
    if (!(y > 0.0) || !std::isfinite(y)) throw domain_error("solve_outer: y must be positive");
    double entropy = m.entropy();
    if (!(entropy > 0.0))
        throw invalid_market("solve_outer: kernel entropy must be positive (non-degenerate)");
    double cap = entropy / (y * u.deriv_at_zero()); // phi(cap) >= 1 by the lower bound

    auto phi_at = [&](double a) { return solve_inner(u, m, a, y, tol).phi; };

    double a_lo = 0.5 * cap;
    int halvings = 0;
    while (phi_at(a_lo) >= 1.0) {
        a_lo *= 0.5;
        if (++halvings > 60)
            throw non_convergent("solve_outer: phi(alpha) < 1 not observed above alpha = cap/2^60");
    }
    double a_hi = cap;
    int grow = 0;
    while (phi_at(a_hi) <= 1.0) {
        // Linear utility attains phi(cap) = 1 exactly; nudge past the root.
        a_hi *= 1.0 + 1e-3;
        if (++grow > 100)
            throw non_convergent("solve_outer: phi stays <= 1 beyond the theoretical cap");
    }
    num::RootResult r =
        num::find_root_monotone([&](double a) { return phi_at(a) <= 1.0; }, {a_lo, a_hi}, tol);
    OuterSolution out;
    out.alpha_star = r.root;
    out.inner = solve_inner(u, m, r.root, y, tol);
    return out;
}

PortfolioSolution solve_portfolio(const ProblemSpec& spec, double tol) {
    if (!std::isfinite(spec.endowment) || !std::isfinite(spec.benchmark))
        throw domain_error("solve_portfolio: endowment and benchmark must be finite");
    PortfolioSolution sol;
    sol.y = spec.benchmark - spec.endowment;
    sol.y_hat = y_hat(spec.utility, spec.market);

    if (sol.y <= 0.0) {
        sol.feasibility = Feasibility::RisklessBenchmark;
        sol.value = 0.0;
        double yconst = -sol.y;
        double x = spec.endowment;
        sol.payoff_y = [yconst](double) { return yconst; };
        sol.payoff_x = [x](double) { return x; };
        sol.closed_form = "X*(rho) = " + fmt(x) + " (constant; meets the budget risklessly)";
        return sol;
    }
    if (num::ExtReal::of(sol.y) >= sol.y_hat) {
        sol.feasibility = Feasibility::Infeasible;
        sol.value = std::numeric_limits<double>::infinity();
        return sol;
    }

    OuterSolution outer = solve_outer(spec.utility, spec.market, sol.y, tol);
    sol.feasibility = Feasibility::Solved;
    sol.alpha_star = outer.alpha_star;
    sol.lambda_star = outer.inner.lambda;
    sol.value = 1.0 / outer.alpha_star;
    sol.payoff_y = outer.inner.payoff;
    double ell = spec.benchmark;
    auto py = outer.inner.payoff;
    sol.payoff_x = [py, ell](double rho) { return py(rho) + ell; };
    sol.budget_residual = outer.inner.budget_residual;
    sol.foc_residual = outer.inner.foc_residual;
    sol.phi_residual = std::abs(outer.inner.phi - 1.0);

    if (spec.utility.kind() == util::Utility::Kind::Linear) {
        double c = spec.endowment + spec.market.entropy() / sol.alpha_star;
        sol.closed_form = "X*(rho) = " + fmt(c) + " - " + fmt(1.0 / sol.alpha_star) + "*ln(rho)";
    } else if (spec.utility.kind() == util::Utility::Kind::Cara) {
        double beta = spec.utility.beta();
        double ln_c = std::log(-sol.lambda_star / beta) + sol.alpha_star;
        sol.closed_form = "X*(rho) = " + fmt(ell) + " + (ln(" + fmt(sol.alpha_star) +
                          ") - ln(W(exp(" + fmt(ln_c) + ")*rho)))/" + fmt(beta);
    }
    if (!sol.y_hat.is_inf() && sol.y > 0.98 * sol.y_hat.get())
        sol.warning = "y within 2% of y_hat; V diverges there and conditioning degrades";
    return sol;
}

std::vector<CurvePoint> risk_curve(const util::Utility& u, const mkt::Market& m,
                                   const std::vector<double>& y_grid, double tol) {
    num::ExtReal yh = y_hat(u, m);
    std::vector<CurvePoint> out;
    out.reserve(y_grid.size());
    for (double y : y_grid) {
        if (!(y > 0.0) || !std::isfinite(y))
            throw domain_error("risk_curve: grid values must be positive");
        CurvePoint p;
        p.y = y;
        if (num::ExtReal::of(y) >= yh) {
            p.value = num::ExtReal::inf();
            p.alpha_star = num::ExtReal::of(0.0);
        } else {
            OuterSolution s = solve_outer(u, m, y, tol);
            p.value = num::ExtReal::of(1.0 / s.alpha_star);
            p.alpha_star = num::ExtReal::of(s.alpha_star);
        }
        out.push_back(p);
    }
    return out;
}

} // namespace dualrisk::slv
