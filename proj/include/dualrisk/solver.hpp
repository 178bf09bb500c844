#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dualrisk/market.hpp"
#include "dualrisk/numerics.hpp"
#include "dualrisk/utility.hpp"

namespace dualrisk::slv {

struct ProblemSpec {
    util::Utility utility;
    mkt::Market market;
    double endowment;  // x
    double benchmark;  // l; surplus y = l - x
};

enum class Feasibility { RisklessBenchmark, Solved, Infeasible };

const char* feasibility_name(Feasibility f);

/// Solution of the inner problem at fixed risk aversion alpha:
/// minimize E[e^{-alpha u(Y)}] subject to E[rho Y] = -y.
struct InnerSolution {
    double alpha = 0.0;
    double lambda = 0.0; // multiplier, < 0
    double phi = 0.0;    // attained value E[e^{-alpha u(Y_alpha)}]
    std::function<double(double)> payoff; // Y_alpha as a function of rho
    double budget_residual = 0.0; // |E[rho Y] + y|
    double foc_residual = 0.0;    // max rel. error of -alpha u'(Y)e^{-alpha u(Y)} = lambda rho
};

struct PortfolioSolution {
    Feasibility feasibility = Feasibility::Infeasible;
    double y = 0.0;
    num::ExtReal y_hat;
    double alpha_star = 0.0;
    double lambda_star = 0.0;
    double value = 0.0; // V(y) = 1/alpha_star; 0 for riskless
    std::function<double(double)> payoff_y; // Y*(rho)
    std::function<double(double)> payoff_x; // X*(rho) = Y*(rho) + benchmark
    std::string closed_form; // descriptor when a closed form exists
    std::string warning;     // conditioning notes (e.g. y near y_hat)
    double budget_residual = 0.0;
    double foc_residual = 0.0;
    double phi_residual = 0.0; // |phi(alpha_star) - 1|
};

struct CurvePoint {
    double y = 0.0;
    num::ExtReal value;      // V(y); +inf marks infeasible points
    num::ExtReal alpha_star; // 0 at infeasible points
};

/// Largest surplus with a finite-risk solution.
/// Linear: 1/essinf(rho). CARA + lognormal: sigma2/(2 beta) closed form.
/// Otherwise: locate the largest multiplier with E[u((u')^{-1}(lambda rho))]
/// > 0 by predicate bisection, then evaluate -E[rho (u')^{-1}(lambda rho)]
/// just above it with one Richardson step toward the limit.
num::ExtReal y_hat(const util::Utility& u, const mkt::Market& m);

/// Inner problem: the optimal payoff is Y = I_alpha(lambda rho) with lambda
/// the unique negative root of E[rho I_alpha(lambda rho)] = -y, found in
/// ln(-lambda) coordinates over a geometrically grown bracket.
InnerSolution solve_inner(const util::Utility& u, const mkt::Market& m, double alpha, double y,
                          double tol = 1e-10);

/// phi(alpha) = value of the inner problem; phi(0) = 1 by convention.
double phi(const util::Utility& u, const mkt::Market& m, double alpha, double y,
           double tol = 1e-10);

struct OuterSolution {
    double alpha_star = 0.0;
    InnerSolution inner;
};

/// Outer equation phi(alpha) = 1: phi is convex, < 1 just above 0 and >= 1
/// at A = entropy/(y u'(0)), so the unique positive root is bracketed by
/// halving down from A/2 and bisected on the predicate phi <= 1. The upper
/// endpoint grows past A by a relative hair when phi(A) itself is <= 1
/// (the linear-utility case has the root exactly at A).
OuterSolution solve_outer(const util::Utility& u, const mkt::Market& m, double y,
                          double tol = 1e-10);

/// Full pipeline on (utility, market, x, l): y <= 0 is the riskless
/// benchmark (V = 0, Y = -y constant), y >= y_hat is infeasible, and
/// otherwise V(y) = 1/alpha_star via the outer equation.
PortfolioSolution solve_portfolio(const ProblemSpec& spec, double tol = 1e-10);

/// V(y) point by point over a grid; infeasible points carry V = +inf.
std::vector<CurvePoint> risk_curve(const util::Utility& u, const mkt::Market& m,
                                   const std::vector<double>& y_grid, double tol = 1e-10);

} // namespace dualrisk::slv
