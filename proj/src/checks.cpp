#include "dualrisk/checks.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "dualrisk/errors.hpp"
#include "dualrisk/index.hpp"
#include "dualrisk/io.hpp"
#include "dualrisk/market.hpp"
#include "dualrisk/solver.hpp"
#include "dualrisk/utility.hpp"

namespace dualrisk::chk {

namespace {

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

struct Recorder {
    SuiteResult& r;
    void expect(bool ok, const std::string& msg) {
        ++r.checks;
        if (!ok) {
            ++r.failures;
            if (r.messages.size() < 10) r.messages.push_back(msg);
        }
    }
};

// Raw-engine uniform in [0,1): identical bits on every platform, unlike the
// standard distribution adapters.
double u01(std::mt19937_64& eng) { return double(eng() >> 11) * 0x1.0p-53; }

} // namespace

std::vector<out::Outcome> random_corpus(std::uint64_t seed, int count) {
    std::mt19937_64 eng(seed);
    std::vector<out::Outcome> corpus;
    corpus.reserve(size_t(count));
    while (int(corpus.size()) < count) {
        size_t n = 2 + size_t(eng() % 5);
        std::vector<out::Atom> atoms;
        atoms.reserve(n);
        atoms.push_back({-(0.2 + 2.8 * u01(eng)), 0.0});
        atoms.push_back({0.2 + 4.8 * u01(eng), 0.0});
        for (size_t i = 2; i < n; ++i) atoms.push_back({-3.0 + 8.0 * u01(eng), 0.0});
        double wsum = 0.0;
        for (out::Atom& a : atoms) {
            a.prob = 0.05 + u01(eng);
            wsum += a.prob;
        }
        for (out::Atom& a : atoms) a.prob /= wsum;
        out::Outcome x = out::Outcome::discrete(std::move(atoms));
        out::Moments m = x.moments();
        // Keep laws comfortably inside the finite-index region so the
        // bracket search stays fast and well-conditioned.
        if (x.classify() != out::Category::A) continue;
        if (m.mean_neg.get() < 0.02) continue;
        if (m.mean_pos.get() - m.mean_neg.get() < 0.02) continue;
        corpus.push_back(std::move(x));
    }
    return corpus;
}

SuiteResult index_property_suite(const CheckOptions& opt) {
    SuiteResult res;
    res.name = "index_properties";
    Recorder rec{res};
    Timer timer;

    std::vector<out::Outcome> corpus = random_corpus(opt.seed, 100);
    std::vector<idx::IndexResult> results;
    results.reserve(corpus.size());
    for (const out::Outcome& x : corpus) results.push_back(idx::duality_index(x, opt.tol));

    for (size_t i = 0; i < corpus.size(); ++i) {
        const out::Outcome& x = corpus[i];
        double rx = results[i].index.get();
        std::string tag = "law " + std::to_string(i);

        for (double k : {0.5, 2.0, 10.0}) {
            double rk = idx::duality_index(x.scale(k), opt.tol).index.get();
            double want = k * rx;
            if (opt.inject_broken_homogeneity) want *= 1.0 + 2e-4;
            rec.expect(std::abs(rk - want) <= 1e-6 * want,
                       tag + ": homogeneity k=" + std::to_string(k) + " got " +
                           std::to_string(rk) + " want " + std::to_string(want));
        }

        const out::Outcome& y = corpus[(i * 17 + 31) % corpus.size()];
        double ry = results[(i * 17 + 31) % corpus.size()].index.get();
        double rsum =
            idx::duality_index(out::Outcome::independent_sum(x, y), opt.tol).index.get();
        rec.expect(rsum <= (rx + ry) * (1.0 + 1e-9) + 10.0 * opt.tol,
                   tag + ": subadditivity violated: R(X+Y)=" + std::to_string(rsum) + " > " +
                       std::to_string(rx + ry));

        const auto& atoms = x.atoms();
        size_t heaviest = 0;
        for (size_t a = 1; a < atoms.size(); ++a)
            if (atoms[a].prob > atoms[heaviest].prob) heaviest = a;
        double eps = 0.25 * (atoms.back().value - atoms.front().value);
        double rspread =
            idx::duality_index(x.mean_preserving_spread(heaviest, eps), opt.tol).index.get();
        rec.expect(rspread > rx + 10.0 * opt.tol * (1.0 + rx),
                   tag + ": mean-preserving spread did not increase the index");

        std::vector<out::Atom> perm(atoms.rbegin(), atoms.rend());
        double rperm = idx::duality_index(out::Outcome::discrete(std::move(perm)), opt.tol)
                           .index.get();
        rec.expect(rperm == rx, tag + ": index changed under atom permutation");
    }
    res.seconds = timer.seconds();
    return res;
}

SuiteResult round_trip_suite(const CheckOptions& opt) {
    SuiteResult res;
    res.name = "round_trips";
    Recorder rec{res};
    Timer timer;

    std::vector<out::Outcome> corpus = random_corpus(opt.seed, 10);
    for (size_t i = 0; i < corpus.size(); ++i) {
        std::string doc = io::render_discrete_distribution(corpus[i]);
        out::Outcome back = io::parse_distribution_text(doc, opt.quad_nodes, "round-trip");
        double a0 = idx::alpha_hat(corpus[i], opt.tol).get();
        double a1 = idx::alpha_hat(back, opt.tol).get();
        rec.expect(std::abs(a0 - a1) <= 1e-9 * (1.0 + a0),
                   "law " + std::to_string(i) + ": alpha_hat drifted across serialization");
    }

    for (const util::Utility& u :
         {util::Utility::linear(), util::Utility::cara(0.25), util::Utility::cara(1.0),
          util::Utility::cara(4.0)}) {
        for (double alpha : {0.25, 1.0, 4.0}) {
            for (int i = 0; i < 30; ++i) {
                double x = -std::pow(10.0, -3.0 + 6.0 * double(i) / 29.0);
                double t = u.inverse_map(alpha, x);
                double back = u.forward_map(alpha, t);
                rec.expect(std::abs(back - x) <= 1e-9 * std::abs(x),
                           "forward(inverse) drifted at alpha=" + std::to_string(alpha) +
                               " x=" + std::to_string(x));
            }
        }
    }

    mkt::Market m = io::parse_market_text(
        R"({"kernel":"discrete","atoms":[[0.5,0.5],[1.5,0.5]]})", opt.quad_nodes, "round-trip");
    double want = 0.5 * (0.5 * std::log(0.5) + 1.5 * std::log(1.5));
    rec.expect(std::abs(m.entropy() - want) <= 1e-12, "discrete kernel entropy drifted");
    res.seconds = timer.seconds();
    return res;
}

SuiteResult closed_form_suite(const CheckOptions& opt) {
    SuiteResult res;
    res.name = "closed_form_agreements";
    Recorder rec{res};
    Timer timer;

    util::Utility lin = util::Utility::linear();
    util::Utility cara1 = util::Utility::cara(1.0);
    mkt::Market logn = mkt::Market::lognormal(1.0, opt.quad_nodes);
    double entropy = logn.entropy(); // sigma2/2 = 0.5

    double y = 0.25;
    for (int i = 0; i < 20; ++i) {
        double alpha = 0.2 + 3.8 * double(i) / 19.0;
        double p = slv::phi(lin, logn, alpha, y, opt.tol);
        double want = std::exp(alpha * y - entropy);
        rec.expect(std::abs(p - want) <= 1e-8,
                   "linear phi(" + std::to_string(alpha) + ") off closed form by " +
                       std::to_string(p - want));
    }
    slv::OuterSolution outer = slv::solve_outer(lin, logn, y, opt.tol);
    rec.expect(std::abs(outer.alpha_star - 2.0) <= 1e-6, "linear alpha_star != entropy/y");

    mkt::Market disc = mkt::Market::discrete({{0.5, 0.5}, {1.5, 0.5}});
    double yh_disc = slv::y_hat(cara1, disc).get();
    rec.expect(std::abs(yh_disc - disc.entropy()) <= 1e-7,
               "CARA y_hat on discrete kernel off entropy/beta by " +
                   std::to_string(yh_disc - disc.entropy()));

    util::Utility cara_as_generic = util::Utility::generic(
        [](double t) { return -std::expm1(-t); }, [](double t) { return std::exp(-t); },
        [](double m2) { return -std::log(m2); });
    double yh_gen = slv::y_hat(cara_as_generic, logn).get();
    rec.expect(std::abs(yh_gen - 0.5) <= 1e-6,
               "generic-CARA y_hat off sigma2/(2 beta) by " + std::to_string(yh_gen - 0.5));

    for (int i = 0; i <= 50; ++i) {
        double z = 2.0 * double(i);
        double w = num::lambert_w(z);
        rec.expect(std::abs(w * std::exp(w) - z) <= 1e-10 * std::max(1.0, z),
                   "W identity failed at z=" + std::to_string(z));
    }

    for (double alpha : {0.25, 1.0, 4.0}) {
        for (int i = 0; i < 30; ++i) {
            double x = -std::pow(10.0, -3.0 + 6.0 * double(i) / 29.0);
            double closed = cara1.inverse_map(alpha, x);
            double newton = cara_as_generic.inverse_map(alpha, x);
            rec.expect(std::abs(closed - newton) <= 1e-8 * (1.0 + std::abs(closed)),
                       "CARA inverse map: closed form vs Newton drift at alpha=" +
                           std::to_string(alpha) + " x=" + std::to_string(x));
        }
    }

    double quad_entropy = logn.expect_rho([](double rho) { return std::log(rho); }).get();
    rec.expect(std::abs(quad_entropy - 0.5) <= 1e-8, "lognormal entropy quadrature drift");
    res.seconds = timer.seconds();
    return res;
}

std::vector<SuiteResult> run_all(const CheckOptions& opt) {
    return {index_property_suite(opt), round_trip_suite(opt), closed_form_suite(opt)};
}

} // namespace dualrisk::chk
