#include "dualrisk/index.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dualrisk/errors.hpp"

namespace dualrisk::idx {

namespace {

constexpr double kBracketCap = 1e8;
constexpr double kBoundaryTol = 1e-8;

struct AlphaHat {
    num::ExtReal alpha;
    num::ExtReal boundary_value;
    bool boundary_attained;
    std::string note;
};

AlphaHat alpha_hat_detail(const out::Outcome& x, double tol, out::Category cat) {
    const num::ExtReal one = num::ExtReal::of(1.0);
    if (cat == out::Category::B)
        return {num::ExtReal::inf(), one, true,
                "no losses: E[e^{-alpha X}] <= 1 for every alpha"};
    if (cat == out::Category::C || cat == out::Category::D)
        return {num::ExtReal::of(0.0), one, true, ""};

    auto pred = [&x, one](double a) { return x.mgf_neg(a) <= one; };
    double lo = 0.0, hi = 1.0;
    while (pred(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > kBracketCap)
            return {num::ExtReal::inf(), one, true,
                    "predicate E[e^{-alpha X}] <= 1 still holds at alpha = 1e8; "
                    "loss mass too small to resolve, reporting alpha_hat = +inf"};
    }
    num::RootResult r = num::find_root_monotone(pred, {lo, hi}, tol);
    num::ExtReal bv = x.mgf_neg(r.last_true);
    bool attained = !bv.is_inf() && std::abs(bv.get() - 1.0) <= kBoundaryTol;
    return {num::ExtReal::of(r.root), bv, attained, ""};
}

} // namespace

num::ExtReal alpha_hat(const out::Outcome& x, double tol) {
    if (!(tol > 0.0)) throw domain_error("alpha_hat: tol must be positive");
    return alpha_hat_detail(x, tol, x.classify()).alpha;
}

IndexResult duality_index(const out::Outcome& x, double tol) {
    if (!(tol > 0.0)) throw domain_error("duality_index: tol must be positive");
    out::Category cat = x.classify();
    AlphaHat a = alpha_hat_detail(x, tol, cat);
    return {a.alpha, a.alpha.recip(), cat, a.boundary_value, a.boundary_attained, a.note};
}

PropertyReport check_properties(const out::Outcome& x, const out::Outcome& y, double tol) {
    if (x.kind() != out::Outcome::Kind::Discrete || y.kind() != out::Outcome::Kind::Discrete)
        throw domain_error("check_properties: finite discrete laws required");
    PropertyReport rep;
    IndexResult rx = duality_index(x, tol);
    IndexResult ry = duality_index(y, tol);
    IndexResult rsum = duality_index(out::Outcome::independent_sum(x, y), tol);

    rep.subadditive = rsum.index <= rx.index + ry.index ||
                      (!rsum.index.is_inf() && !(rx.index + ry.index).is_inf() &&
                       rsum.index.get() <= (rx.index + ry.index).get() * (1.0 + 1e-9) + 10 * tol);
    if (!rsum.index.is_inf() && !(rx.index + ry.index).is_inf())
        rep.subadditivity_slack = (rx.index + ry.index).get() - rsum.index.get();

    rep.homogeneous = true;
    for (double k : {0.5, 2.0, 10.0}) {
        IndexResult rk = duality_index(x.scale(k), tol);
        num::ExtReal want = k * rx.index;
        double rel;
        if (rk.index.is_inf() || want.is_inf())
            rel = (rk.index.is_inf() && want.is_inf()) ? 0.0 : 1.0;
        else
            rel = std::abs(rk.index.get() - want.get()) /
                  std::max(want.get(), 1e-300);
        rep.worst_homogeneity_rel_err = std::max(rep.worst_homogeneity_rel_err, rel);
        if (rel > 1e-6) rep.homogeneous = false;
    }

    // Spread the heaviest atom by a quarter of the support span: mean is
    // preserved, so an A-category law stays A and its index must strictly rise.
    const auto& atoms = x.atoms();
    size_t heaviest = 0;
    for (size_t i = 1; i < atoms.size(); ++i)
        if (atoms[i].prob > atoms[heaviest].prob) heaviest = i;
    double span = atoms.back().value - atoms.front().value;
    double eps = span > 0.0 ? 0.25 * span : 0.5;
    IndexResult rspread = duality_index(x.mean_preserving_spread(heaviest, eps), tol);
    if (!rspread.index.is_inf() && !rx.index.is_inf()) {
        rep.spread_increase = rspread.index.get() - rx.index.get();
        rep.spread_monotone = rep.spread_increase > 10.0 * tol * (1.0 + rx.index.get());
    } else {
        rep.spread_monotone = rspread.index >= rx.index;
    }

    std::vector<out::Atom> perm(atoms.rbegin(), atoms.rend());
    std::rotate(perm.begin(), perm.begin() + perm.size() / 2, perm.end());
    IndexResult rperm = duality_index(out::Outcome::discrete(std::move(perm)), tol);
    rep.permutation_invariant = rperm.index == rx.index;
    return rep;
}

} // namespace dualrisk::idx
