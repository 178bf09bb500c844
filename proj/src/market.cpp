#include "dualrisk/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualrisk/errors.hpp"

namespace dualrisk::mkt {

namespace {

constexpr double kMassTol = 1e-9;

void check_nodes(int n) {
    if (n < 8 || n > 4096 || n % 2 != 0)
        throw invalid_market("quad_nodes must be even and in [8, 4096]");
}

// Exact sum over kernel atoms; +inf values propagate, NaN and -inf raise.
num::ExtReal atom_sum(const std::vector<out::Atom>& atoms,
                      const std::function<double(double)>& f) {
    double acc = 0.0, comp = 0.0;
    for (const out::Atom& a : atoms) {
        double v = f(a.value);
        if (std::isnan(v)) throw non_finite("kernel expectation: NaN at an atom");
        if (std::isinf(v)) {
            if (v < 0.0) throw non_finite("kernel expectation: -inf at an atom");
            return num::ExtReal::inf();
        }
        double y = a.prob * v - comp;
        double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    if (!std::isfinite(acc)) return num::ExtReal::inf();
    return num::ExtReal::of(acc);
}

} // namespace

Market Market::lognormal(double sigma2, int quad_nodes) {
    if (!std::isfinite(sigma2) || sigma2 <= 0.0)
        throw invalid_market("lognormal: sigma2 must be positive");
    check_nodes(quad_nodes);
    Market m;
    m.kind_ = Kind::Lognormal;
    m.sigma2_ = sigma2;
    m.mu_ = -0.5 * sigma2; // E[rho] = e^{mu + sigma2/2} = 1
    m.quad_nodes_ = quad_nodes;
    return m;
}

Market Market::discrete(std::vector<out::Atom> atoms) {
    std::vector<out::Atom> kept;
    kept.reserve(atoms.size());
    double psum = 0.0;
    for (const out::Atom& a : atoms) {
        if (!std::isfinite(a.value) || a.value <= 0.0)
            throw invalid_market("discrete kernel: values must be positive");
        if (std::isnan(a.prob) || a.prob < 0.0)
            throw invalid_market("discrete kernel: negative or NaN probability");
        if (a.prob > 0.0) {
            kept.push_back(a);
            psum += a.prob;
        }
    }
    if (kept.empty()) throw invalid_market("discrete kernel: no atoms");
    if (std::abs(psum - 1.0) > kMassTol)
        throw invalid_market("discrete kernel: probabilities sum to " + std::to_string(psum));
    for (out::Atom& a : kept) a.prob /= psum;
    std::sort(kept.begin(), kept.end(),
              [](const out::Atom& a, const out::Atom& b) { return a.value < b.value; });
    std::vector<out::Atom> merged;
    for (const out::Atom& a : kept) {
        if (!merged.empty() && merged.back().value == a.value)
            merged.back().prob += a.prob;
        else
            merged.push_back(a);
    }
    double mean = 0.0;
    for (const out::Atom& a : merged) mean += a.prob * a.value;
    // Renormalizing values here would silently change prices, so E[rho] = 1
    // is demanded of the input, not repaired.
    if (std::abs(mean - 1.0) > kMassTol)
        throw invalid_market("discrete kernel: E[rho] = " + std::to_string(mean) +
                             ", must be 1 within 1e-9");
    Market m;
    m.kind_ = Kind::Discrete;
    m.atoms_ = std::move(merged);
    return m;
}

double Market::sigma2() const {
    if (kind_ != Kind::Lognormal) throw domain_error("sigma2(): not a lognormal kernel");
    return sigma2_;
}

const std::vector<out::Atom>& Market::atoms() const {
    if (kind_ != Kind::Discrete) throw domain_error("atoms(): not a discrete kernel");
    return atoms_;
}

double Market::entropy() const {
    if (kind_ == Kind::Lognormal) return 0.5 * sigma2_; // E[rho ln rho] = mu + sigma2
    double acc = 0.0;
    for (const out::Atom& a : atoms_) acc += a.prob * a.value * std::log(a.value);
    return acc;
}

double Market::log_mean() const {
    if (kind_ == Kind::Lognormal) return mu_;
    double acc = 0.0;
    for (const out::Atom& a : atoms_) acc += a.prob * std::log(a.value);
    return acc;
}

double Market::ess_inf() const {
    if (kind_ == Kind::Lognormal) return 0.0;
    return atoms_.front().value;
}

double Market::rho_of_z(double z) const {
    if (kind_ != Kind::Lognormal) throw domain_error("rho_of_z(): not a lognormal kernel");
    return std::exp(mu_ + std::sqrt(sigma2_) * z);
}

num::ExtReal Market::expect(const std::function<double(double)>& h) const {
    if (kind_ == Kind::Discrete) return atom_sum(atoms_, h);
    const auto& rule = num::QuadratureRule::gauss_hermite(quad_nodes_);
    return num::gauss_expectation([&](double z) { return h(rho_of_z(z)); }, rule);
}

num::ExtReal Market::expect_rho(const std::function<double(double)>& h) const {
    if (kind_ == Kind::Discrete)
        return atom_sum(atoms_, [&](double v) { return v * h(v); });
    const auto& rule = num::QuadratureRule::gauss_hermite(quad_nodes_);
    return num::gauss_expectation(
        [&](double z) {
            double rho = rho_of_z(z);
            return rho * h(rho);
        },
        rule);
}

} // namespace dualrisk::mkt
