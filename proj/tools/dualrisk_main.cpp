#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dualrisk/checks.hpp"
#include "dualrisk/errors.hpp"
#include "dualrisk/index.hpp"
#include "dualrisk/io.hpp"
#include "dualrisk/market.hpp"
#include "dualrisk/solver.hpp"
#include "dualrisk/utility.hpp"

namespace {

using namespace dualrisk;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInfeasible = 3;

struct Options {
    double tol = 1e-10;
    int nodes = 128;
    std::string format = "json";
    std::string out;
    std::uint64_t seed = 20260819;
};

void write_output(const Options& opt, const std::string& doc) {
    std::string body = doc;
    if (body.empty() || body.back() != '\n') body += "\n";
    if (opt.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw parse_error("cannot write output file: " + opt.out);
    f << body;
}

// 41 log-spaced kernel values covering the market's support (+-4 sigma in
// log space for lognormal kernels, atom range for discrete ones).
std::vector<double> payoff_grid(const mkt::Market& m) {
    std::vector<double> rhos;
    rhos.reserve(41);
    if (m.kind() == mkt::Market::Kind::Lognormal) {
        for (int i = 0; i <= 40; ++i) rhos.push_back(m.rho_of_z(-4.0 + 8.0 * double(i) / 40.0));
        return rhos;
    }
    double lo = m.atoms().front().value, hi = m.atoms().back().value;
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i <= 40; ++i) rhos.push_back(std::exp(llo + (lhi - llo) * double(i) / 40.0));
    return rhos;
}

int cmd_index(const Options& opt, const std::string& dist_path) {
    out::Outcome x = io::parse_distribution_file(dist_path, opt.nodes);
    idx::IndexResult r = idx::duality_index(x, opt.tol);
    std::string doc;
    if (opt.format == "json") {
        io::JsonWriter w;
        w.field("category", std::string(out::category_name(r.category)))
            .field("alpha_hat", r.alpha_hat)
            .field("index", r.index)
            .field("boundary_value", r.boundary_value)
            .field_bool("boundary_attained", r.boundary_attained)
            .field("note", r.note);
        doc = w.str();
    } else {
        doc = io::csv_row({"category", "alpha_hat", "index", "boundary_value",
                           "boundary_attained", "note"}) +
              io::csv_row({out::category_name(r.category), io::fmt_ext(r.alpha_hat),
                           io::fmt_ext(r.index), io::fmt_ext(r.boundary_value),
                           r.boundary_attained ? "true" : "false", r.note});
    }
    write_output(opt, doc);
    return kExitOk;
}

int cmd_solve(const Options& opt, const std::string& upath, const std::string& mpath, double x,
              double ell) {
    util::Utility u = io::parse_utility_file(upath);
    mkt::Market m = io::parse_market_file(mpath, opt.nodes);
    slv::PortfolioSolution sol = slv::solve_portfolio({u, m, x, ell}, opt.tol);

    std::vector<std::pair<double, double>> table;
    if (sol.feasibility != slv::Feasibility::Infeasible) {
        for (double rho : payoff_grid(m)) table.emplace_back(rho, sol.payoff_x(rho));
    }

    std::string doc;
    if (opt.format == "json") {
        std::string rows;
        for (const auto& [rho, px] : table) {
            if (!rows.empty()) rows += ",";
            rows += "[" + io::fmt_num(rho) + "," + io::fmt_num(px) + "]";
        }
        io::JsonWriter w;
        w.field("feasibility", std::string(slv::feasibility_name(sol.feasibility)))
            .field("y", sol.y)
            .field("y_hat", sol.y_hat)
            .field("V", sol.value)
            .field("alpha_star", sol.alpha_star)
            .field("lambda_star", sol.lambda_star)
            .field("budget_residual", sol.budget_residual)
            .field("foc_residual", sol.foc_residual)
            .field("phi_residual", sol.phi_residual)
            .field("closed_form", sol.closed_form)
            .field("warning", sol.warning)
            .field_raw("payoff", "[" + rows + "]");
        doc = w.str();
    } else {
        doc = io::csv_row({"feasibility", "y", "y_hat", "V", "alpha_star", "lambda_star",
                           "budget_residual", "foc_residual", "phi_residual"}) +
              io::csv_row({slv::feasibility_name(sol.feasibility), io::fmt_num(sol.y),
                           io::fmt_ext(sol.y_hat), io::fmt_num(sol.value),
                           io::fmt_num(sol.alpha_star), io::fmt_num(sol.lambda_star),
                           io::fmt_num(sol.budget_residual), io::fmt_num(sol.foc_residual),
                           io::fmt_num(sol.phi_residual)}) +
              "\n" + io::csv_row({"rho", "X"});
        for (const auto& [rho, px] : table)
            doc += io::csv_row({io::fmt_num(rho), io::fmt_num(px)});
    }
    write_output(opt, doc);
    if (sol.feasibility == slv::Feasibility::Infeasible) {
        std::cerr << "infeasible: y = " << io::fmt_num(sol.y)
                  << " >= y_hat = " << io::fmt_ext(sol.y_hat) << "\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_curve(const Options& opt, const std::string& upath, const std::string& mpath, double ymin,
              double ymax, int steps) {
    if (!(ymin > 0.0) || !(ymax > ymin) || steps < 2) {
        std::cerr << "error: curve requires 0 < ymin < ymax and steps >= 2\n";
        return kExitInputError;
    }
    util::Utility u = io::parse_utility_file(upath);
    mkt::Market m = io::parse_market_file(mpath, opt.nodes);
    std::vector<double> grid;
    grid.reserve(size_t(steps));
    for (int i = 0; i < steps; ++i)
        grid.push_back(ymin + (ymax - ymin) * double(i) / double(steps - 1));
    std::vector<slv::CurvePoint> pts = slv::risk_curve(u, m, grid, opt.tol);

    std::string doc;
    if (opt.format == "json") {
        std::string rows;
        for (const slv::CurvePoint& p : pts) {
            if (!rows.empty()) rows += ",";
            io::JsonWriter w;
            w.field("y", p.y).field("V", p.value).field("alpha_star", p.alpha_star);
            rows += w.str();
        }
        io::JsonWriter w;
        w.field_raw("points", "[" + rows + "]");
        doc = w.str();
    } else {
        doc = io::csv_row({"y", "V", "alpha_star"});
        for (const slv::CurvePoint& p : pts)
            doc += io::csv_row({io::fmt_num(p.y), io::fmt_ext(p.value), io::fmt_ext(p.alpha_star)});
    }
    write_output(opt, doc);
    return kExitOk;
}

int cmd_check(const Options& opt, bool inject_broken_homogeneity) {
    chk::CheckOptions copt;
    copt.seed = opt.seed;
    copt.tol = opt.tol;
    copt.quad_nodes = opt.nodes;
    copt.inject_broken_homogeneity = inject_broken_homogeneity;
    std::vector<chk::SuiteResult> suites = chk::run_all(copt);

    bool all_passed = true;
    for (const chk::SuiteResult& s : suites) {
        all_passed = all_passed && s.passed();
        // Timing is diagnostic-only and goes to stderr so the result document
        // stays byte-identical across reruns with the same seed.
        std::fprintf(stderr, "suite %s: %d checks, %d failures, %.3f s\n", s.name.c_str(),
                     s.checks, s.failures, s.seconds);
    }

    std::string doc;
    if (opt.format == "json") {
        std::string rows;
        for (const chk::SuiteResult& s : suites) {
            if (!rows.empty()) rows += ",";
            std::string msgs;
            for (const std::string& msg : s.messages) {
                if (!msgs.empty()) msgs += ",";
                msgs += "\"" + io::json_escape(msg) + "\"";
            }
            io::JsonWriter w;
            w.field("name", s.name)
                .field_int("checks", s.checks)
                .field_int("failures", s.failures)
                .field_bool("passed", s.passed())
                .field_raw("messages", "[" + msgs + "]");
            rows += w.str();
        }
        io::JsonWriter w;
        w.field_raw("suites", "[" + rows + "]").field_bool("passed", all_passed);
        doc = w.str();
    } else {
        doc = io::csv_row({"suite", "checks", "failures", "passed"});
        for (const chk::SuiteResult& s : suites)
            doc += io::csv_row({s.name, std::to_string(s.checks), std::to_string(s.failures),
                                s.passed() ? "true" : "false"});
    }
    write_output(opt, doc);
    return all_passed ? kExitOk : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"duality risk index and complete-market portfolio selection"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--tol", opt.tol, "root-finding tolerance (default 1e-10)");
    app.add_option("--nodes", opt.nodes, "quadrature node count, even, in [8,4096] (default 128)");
    app.add_option("--format", opt.format, "output format: json or csv (default json)");
    app.add_option("--out", opt.out, "write the result document to this path instead of stdout");
    app.add_option("--seed", opt.seed, "corpus seed for check (default 20260819)");

    std::string dist_path, upath, mpath;
    double x = 0.0, ell = 0.0, ymin = 0.0, ymax = 0.0;
    int steps = 0;
    bool inject = false;

    CLI::App* c_index = app.add_subcommand("index", "duality risk index of an outcome law");
    c_index->add_option("distribution", dist_path, "distribution JSON file")->required();

    CLI::App* c_solve = app.add_subcommand("solve", "portfolio selection at one surplus level");
    c_solve->add_option("utility", upath, "utility JSON file")->required();
    c_solve->add_option("market", mpath, "market JSON file")->required();
    c_solve->add_option("x", x, "initial endowment")->required();
    c_solve->add_option("l", ell, "benchmark outcome")->required();

    CLI::App* c_curve = app.add_subcommand("curve", "V(y) over a surplus grid");
    c_curve->add_option("utility", upath, "utility JSON file")->required();
    c_curve->add_option("market", mpath, "market JSON file")->required();
    c_curve->add_option("ymin", ymin, "smallest surplus, > 0")->required();
    c_curve->add_option("ymax", ymax, "largest surplus, > ymin")->required();
    c_curve->add_option("steps", steps, "grid size, >= 2")->required();

    CLI::App* c_check = app.add_subcommand("check", "run the invariant suites");
    c_check->add_flag("--inject-broken-homogeneity", inject,
                      "debug negative control: skew the homogeneity comparison")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    if (!(opt.tol > 0.0) || opt.nodes < 8 || opt.nodes > 4096 || opt.nodes % 2 != 0 ||
        (opt.format != "json" && opt.format != "csv")) {
        std::cerr << "error: --tol must be > 0, --nodes even in [8,4096], --format json|csv\n";
        return kExitInputError;
    }

    try {
        if (app.got_subcommand(c_index)) return cmd_index(opt, dist_path);
        if (app.got_subcommand(c_solve)) return cmd_solve(opt, upath, mpath, x, ell);
        if (app.got_subcommand(c_curve)) return cmd_curve(opt, upath, mpath, ymin, ymax, steps);
        return cmd_check(opt, inject);
    } catch (const dualrisk::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}
