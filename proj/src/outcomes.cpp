#include "dualrisk/outcomes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualrisk/errors.hpp"

namespace dualrisk::out {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr size_t kMaxMaterializedAtoms = 3000000;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Validates, sorts, merges duplicate values, renormalizes. Zero-probability
// atoms are dropped so materialized deep tails (whose atom probabilities
// underflow) stay constructible.
std::vector<Atom> canonicalize(std::vector<Atom> atoms) {
    std::vector<Atom> kept;
    kept.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (!std::isfinite(a.value)) throw invalid_distribution("discrete: non-finite atom value");
        if (std::isnan(a.prob) || a.prob < 0.0)
            throw invalid_distribution("discrete: negative or NaN atom probability");
        if (a.prob > 0.0) kept.push_back(a);
    }
    if (kept.empty()) throw invalid_distribution("discrete: no atoms with positive probability");
    std::sort(kept.begin(), kept.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    merged.reserve(kept.size());
    for (const Atom& a : kept) {
        if (!merged.empty() && merged.back().value == a.value)
            merged.back().prob += a.prob;
        else
            merged.push_back(a);
    }
    double sum = 0.0;
    for (const Atom& a : merged) sum += a.prob;
    if (std::abs(sum - 1.0) > kMassTol)
        throw invalid_distribution("discrete: probabilities sum to " + std::to_string(sum));
    for (Atom& a : merged) a.prob /= sum;
    return merged;
}

// Kahan sum of c * n^{-p} e^{-rn} over n in [1, K).
double tail_partial_mass(double r, double p, double c, size_t upto_exclusive) {
    double acc = 0.0, comp = 0.0;
    for (size_t n = 1; n < upto_exclusive; ++n) {
        double t = c * std::exp(-p * std::log(double(n)) - r * double(n));
        double y = t - comp;
        double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    return acc;
}

// Tail mass c * sum_{n >= from} n^{-p} e^{-rn}. For fast decay the sum is
// direct with a geometric stop bound; for slow decay it is the full series
// minus an exact partial sum (terms positive and decreasing, so the
// difference loses no more relative accuracy than the remainder's share).
double tail_mass_from(double r, double p, double c, size_t from) {
    if (from <= 1) return c * num::exp_power_tail_sum(p, r).get();
    if (r >= 1e-3) {
        double acc = 0.0, comp = 0.0;
        double geo = 1.0 / std::expm1(r);
        for (size_t n = from; n < from + 3000000; ++n) {
            double t = std::exp(-p * std::log(double(n)) - r * double(n));
            double y = t - comp;
            double s = acc + y;
            comp = (s - acc) - y;
            acc = s;
            if (t * geo <= acc * 1e-17 + 1e-320) break;
        }
        return c * acc;
    }
    double full = num::exp_power_tail_sum(p, r).get();
    return c * (full - tail_partial_mass(r, p, 1.0, from));
}

// E[e^{-alpha v}] contribution of one atom, log-space guarded so that a
// representable product p * e^{-alpha v} never overflows prematurely.
num::ExtReal atom_mgf_term(double prob, double value, double alpha) {
    double e = -alpha * value;
    if (e <= 690.0) return num::ExtReal::of(prob * std::exp(e));
    double le = std::log(prob) + e;
    if (le > num::kOverflowExponent) return num::ExtReal::inf();
    return num::ExtReal::of(std::exp(le));
}

} // namespace

Outcome Outcome::discrete(std::vector<Atom> atoms) {
    return Outcome(DiscreteRep{canonicalize(std::move(atoms))});
}

Outcome Outcome::exp_tail(double r, double p, double c, std::vector<Atom> head) {
    if (!std::isfinite(r) || r < 0.0) throw invalid_distribution("exp_tail: decay r must be >= 0");
    if (!std::isfinite(p) || p < 0.0) throw invalid_distribution("exp_tail: power p must be >= 0");
    if (r == 0.0 && p <= 1.0)
        throw invalid_distribution("exp_tail: r == 0 requires p > 1 for finite tail mass");
    if (!std::isfinite(c) || c <= 0.0) throw invalid_distribution("exp_tail: scale c must be > 0");
    double head_mass = 0.0;
    std::vector<Atom> kept;
    kept.reserve(head.size());
    for (const Atom& a : head) {
        if (!std::isfinite(a.value)) throw invalid_distribution("exp_tail: non-finite head value");
        if (std::isnan(a.prob) || a.prob < 0.0)
            throw invalid_distribution("exp_tail: negative or NaN head probability");
        if (a.prob > 0.0) {
            kept.push_back(a);
            head_mass += a.prob;
        }
    }
    double tail_mass = c * num::exp_power_tail_sum(p, r).get();
    double total = head_mass + tail_mass;
    if (std::abs(total - 1.0) > kMassTol)
        throw invalid_distribution("exp_tail: head plus tail mass is " + std::to_string(total));
    for (Atom& a : kept) a.prob /= total;
    return Outcome(ExpTailRep{r, p, c / total, 1.0, 0.0, std::move(kept)});
}

Outcome Outcome::exp_tail_with_rest(double r, double p, double c, double head_value) {
    if (!std::isfinite(c) || c <= 0.0) throw invalid_distribution("exp_tail: scale c must be > 0");
    if (!std::isfinite(r) || r < 0.0) throw invalid_distribution("exp_tail: decay r must be >= 0");
    if (!std::isfinite(p) || p < 0.0) throw invalid_distribution("exp_tail: power p must be >= 0");
    if (r == 0.0 && p <= 1.0)
        throw invalid_distribution("exp_tail: r == 0 requires p > 1 for finite tail mass");
    double tail_mass = c * num::exp_power_tail_sum(p, r).get();
    double rest = 1.0 - tail_mass;
    if (rest <= 0.0 || rest >= 1.0)
        throw invalid_distribution("exp_tail: tail mass " + std::to_string(tail_mass) +
                                   " leaves no head probability in (0,1)");
    return exp_tail(r, p, c, {{head_value, rest}});
}

Outcome Outcome::normal_map(std::function<double(double)> g, NormalMapInfo info) {
    if (!g) throw invalid_distribution("normal_map: empty function");
    if (info.quad_nodes < 8 || info.quad_nodes > 4096)
        throw invalid_distribution("normal_map: quad_nodes out of [8, 4096]");
    if (info.mgf_radius < num::ExtReal::of(0.0))
        throw invalid_distribution("normal_map: negative declared radius");
    return Outcome(NormalMapRep{std::move(g), std::move(info)});
}

Outcome::Kind Outcome::kind() const {
    if (std::holds_alternative<DiscreteRep>(rep_)) return Kind::Discrete;
    if (std::holds_alternative<ExpTailRep>(rep_)) return Kind::ExpTail;
    return Kind::NormalMap;
}

const std::vector<Atom>& Outcome::atoms() const {
    const auto* d = std::get_if<DiscreteRep>(&rep_);
    if (!d) throw domain_error("atoms(): not a discrete law");
    return d->atoms;
}

double Outcome::map_at(double z) const {
    const auto* m = std::get_if<NormalMapRep>(&rep_);
    if (!m) throw domain_error("map_at(): not a normal-map law");
    return m->g(z);
}

const NormalMapInfo& Outcome::map_info() const {
    const auto* m = std::get_if<NormalMapRep>(&rep_);
    if (!m) throw domain_error("map_info(): not a normal-map law");
    return m->info;
}

namespace {

Moments discrete_moments(const std::vector<Atom>& atoms) {
    double pos = 0.0, neg = 0.0;
    for (const Atom& a : atoms) {
        if (a.value > 0.0)
            pos += a.prob * a.value;
        else
            neg += a.prob * (-a.value);
    }
    return {num::ExtReal::of(pos), num::ExtReal::of(neg), num::ExtReal::inf()};
}

// Sign-segmented integration of g against the standard normal density.
// Crossings are located by a scan over [-18, 18] (mass beyond is < 1e-70);
// each one-signed segment integrates smoothly under Gauss-Legendre panels.
Moments normal_map_moments(const std::function<double(double)>& g) {
    constexpr double zlo = -18.0, zhi = 18.0;
    constexpr int scan_points = 721;
    std::vector<double> edges;
    edges.push_back(zlo);
    double prev_z = zlo;
    double prev_g = g(zlo);
    if (std::isnan(prev_g)) throw non_finite("normal map returned NaN");
    for (int i = 1; i < scan_points; ++i) {
        double z = zlo + (zhi - zlo) * double(i) / double(scan_points - 1);
        double gz = g(z);
        if (std::isnan(gz)) throw non_finite("normal map returned NaN");
        if ((prev_g < 0.0 && gz > 0.0) || (prev_g > 0.0 && gz < 0.0)) {
            double a = prev_z, b = z, fa = prev_g;
            for (int it = 0; it < 60; ++it) {
                double m = 0.5 * (a + b);
                double fm = g(m);
                if (fm == 0.0) { a = b = m; break; }
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            edges.push_back(0.5 * (a + b));
        } else if (prev_g == 0.0 && i > 1) {
            edges.push_back(prev_z);
        }
        prev_z = z;
        prev_g = gz;
    }
    edges.push_back(zhi);
    double pos = 0.0, neg = 0.0;
    for (size_t s = 0; s + 1 < edges.size(); ++s) {
        double a = edges[s], b = edges[s + 1];
        if (b <= a) continue;
        int panels = std::max(1, int(std::ceil((b - a) / 0.375)));
        double integral = num::gauss_legendre(
            [&g](double z) { return g(z) * normal_pdf(z); }, a, b, panels);
        if (!std::isfinite(integral)) throw non_finite("normal map moment integral");
        if (integral > 0.0)
            pos += integral;
        else
            neg -= integral;
    }
    return {num::ExtReal::of(pos), num::ExtReal::of(neg), num::ExtReal::inf()};
}

} // namespace

Moments Outcome::moments() const {
    if (const auto* d = std::get_if<DiscreteRep>(&rep_)) return discrete_moments(d->atoms);
    if (const auto* m = std::get_if<NormalMapRep>(&rep_)) {
        Moments mm = normal_map_moments(m->g);
        mm.mgf_radius = m->info.mgf_radius;
        return mm;
    }
    const auto& t = std::get<ExpTailRep>(rep_);
    double pos = 0.0, neg_head = 0.0;
    for (const Atom& a : t.head) {
        if (a.value > 0.0)
            pos += a.prob * a.value;
        else
            neg_head += a.prob * (-a.value);
    }
    // Tail atom n has value -kn + c0; atoms with n <= m0 = floor(c0/k) land at
    // nonnegative values and move to the gain side.
    size_t m0 = 0;
    if (t.c0 > 0.0) {
        double m0d = std::floor(t.c0 / t.k);
        if (m0d > double(kMaxMaterializedAtoms))
            throw domain_error("exp_tail moments: affine head covers too many tail atoms");
        m0 = size_t(m0d);
        for (size_t n = 1; n <= m0; ++n) {
            double q = t.c * std::exp(-t.p * std::log(double(n)) - t.r * double(n));
            pos += q * (t.c0 - t.k * double(n));
        }
    }
    num::ExtReal s_first = num::exp_power_tail_sum(t.p - 1.0, t.r);
    num::ExtReal neg;
    if (s_first.is_inf()) {
        neg = num::ExtReal::inf();
    } else {
        double rem1 = s_first.get() - tail_partial_mass(t.r, t.p - 1.0, 1.0, m0 + 1);
        double rem0 =
            num::exp_power_tail_sum(t.p, t.r).get() - tail_partial_mass(t.r, t.p, 1.0, m0 + 1);
        neg = num::ExtReal::of(neg_head + t.c * (t.k * rem1 - t.c0 * rem0));
    }
    return {num::ExtReal::of(pos), neg, num::ExtReal::of(t.r / t.k)};
}

num::ExtReal Outcome::mgf_neg(double alpha) const {
    if (std::isnan(alpha) || alpha < 0.0) throw domain_error("mgf_neg: alpha must be >= 0");
    // E[e^{0}] = 1 identically; evaluating the sum instead would return the
    // renormalized mass, which can sit one ulp off 1 and break the bracket
    // predicate at alpha = 0.
    if (alpha == 0.0) return num::ExtReal::of(1.0);
    if (const auto* d = std::get_if<DiscreteRep>(&rep_)) {
        double acc = 0.0, comp = 0.0;
        for (const Atom& a : d->atoms) {
            num::ExtReal term = atom_mgf_term(a.prob, a.value, alpha);
            if (term.is_inf()) return term;
            double y = term.get() - comp;
            double s = acc + y;
            comp = (s - acc) - y;
            acc = s;
        }
        return num::ExtReal::of(acc);
    }
    if (const auto* m = std::get_if<NormalMapRep>(&rep_)) {
        if (num::ExtReal::of(alpha) > m->info.mgf_radius) return num::ExtReal::inf();
        const auto& rule = num::QuadratureRule::gauss_hermite(m->info.quad_nodes);
        return num::gauss_expectation(
            [&](double z) {
                double e = -alpha * m->g(z);
                if (e > num::kOverflowExponent) return std::numeric_limits<double>::infinity();
                return std::exp(e);
            },
            rule);
    }
    const auto& t = std::get<ExpTailRep>(rep_);
    double acc = 0.0;
    for (const Atom& a : t.head) {
        num::ExtReal term = atom_mgf_term(a.prob, a.value, alpha);
        if (term.is_inf()) return term;
        acc += term.get();
    }
    // Tail: sum q_n e^{alpha(kn - c0)} = e^{-alpha c0} * c * S(p, r - alpha k).
    num::ExtReal series = num::exp_power_tail_sum(t.p, t.r - alpha * t.k);
    if (series.is_inf()) return series;
    if (series.get() > 0.0) {
        double log_tail = -alpha * t.c0 + std::log(t.c) + std::log(series.get());
        if (log_tail > num::kOverflowExponent) return num::ExtReal::inf();
        acc += std::exp(log_tail);
    }
    return num::ExtReal::of(acc);
}

Outcome Outcome::scale(double k) const {
    if (!std::isfinite(k) || k <= 0.0) throw domain_error("scale: factor must be positive");
    if (const auto* d = std::get_if<DiscreteRep>(&rep_)) {
        std::vector<Atom> atoms = d->atoms;
        for (Atom& a : atoms) a.value *= k;
        return Outcome(DiscreteRep{std::move(atoms)});
    }
    if (const auto* m = std::get_if<NormalMapRep>(&rep_)) {
        NormalMapInfo info = m->info;
        if (!info.mgf_radius.is_inf())
            info.mgf_radius = num::ExtReal::of(info.mgf_radius.get() / k);
        auto base = m->g;
        return Outcome(NormalMapRep{[base, k](double z) { return k * base(z); }, std::move(info)});
    }
    ExpTailRep t = std::get<ExpTailRep>(rep_);
    t.k *= k;
    t.c0 *= k;
    for (Atom& a : t.head) a.value *= k;
    return Outcome(std::move(t));
}

Outcome Outcome::shift(double c) const {
    if (!std::isfinite(c)) throw domain_error("shift: offset must be finite");
    if (const auto* d = std::get_if<DiscreteRep>(&rep_)) {
        std::vector<Atom> atoms = d->atoms;
        for (Atom& a : atoms) a.value += c;
        return Outcome(DiscreteRep{std::move(atoms)});
    }
    if (const auto* m = std::get_if<NormalMapRep>(&rep_)) {
        auto base = m->g;
        return Outcome(NormalMapRep{[base, c](double z) { return base(z) + c; }, m->info});
    }
    ExpTailRep t = std::get<ExpTailRep>(rep_);
    t.c0 += c;
    for (Atom& a : t.head) a.value += c;
    return Outcome(std::move(t));
}

Outcome Outcome::truncate(double n) const {
    if (!std::isfinite(n) || n <= 0.0) throw domain_error("truncate: bound must be positive");
    if (const auto* d = std::get_if<DiscreteRep>(&rep_)) {
        std::vector<Atom> atoms = d->atoms;
        for (Atom& a : atoms) a.value = std::clamp(a.value, -n, n);
        return discrete(std::move(atoms));
    }
    if (const auto* m = std::get_if<NormalMapRep>(&rep_)) {
        NormalMapInfo info = m->info;
        info.mgf_radius = num::ExtReal::inf(); // bounded support
        auto base = m->g;
        return Outcome(NormalMapRep{
            [base, n](double z) { return std::clamp(base(z), -n, n); }, std::move(info)});
    }
    const auto& t = std::get<ExpTailRep>(rep_);
    std::vector<Atom> atoms;
    for (const Atom& a : t.head) atoms.push_back({std::clamp(a.value, -n, n), a.prob});
    // Tail atom n' survives the clamp iff -k n' + c0 >= -n.
    double keepd = std::floor((n + t.c0) / t.k);
    if (keepd > double(kMaxMaterializedAtoms))
        throw domain_error("truncate: tail materializes too many atoms");
    size_t keep = keepd < 0.0 ? 0 : size_t(keepd);
    for (size_t m2 = 1; m2 <= keep; ++m2) {
        double q = t.c * std::exp(-t.p * std::log(double(m2)) - t.r * double(m2));
        atoms.push_back({std::clamp(-t.k * double(m2) + t.c0, -n, n), q});
    }
    double folded = tail_mass_from(t.r, t.p, t.c, keep + 1);
    if (folded > 0.0) atoms.push_back({-n, folded});
    return discrete(std::move(atoms));
}

Outcome Outcome::independent_sum(const Outcome& x, const Outcome& y) {
    const auto* dx = std::get_if<DiscreteRep>(&x.rep_);
    const auto* dy = std::get_if<DiscreteRep>(&y.rep_);
    if (!dx || !dy) throw domain_error("independent_sum: both laws must be finite discrete");
    std::vector<Atom> atoms;
    atoms.reserve(dx->atoms.size() * dy->atoms.size());
    for (const Atom& a : dx->atoms)
        for (const Atom& b : dy->atoms) atoms.push_back({a.value + b.value, a.prob * b.prob});
    return discrete(std::move(atoms));
}

const char* category_name(Category c) {
    switch (c) {
        case Category::A: return "A";
        case Category::B: return "B";
        case Category::C: return "C";
        default: return "D";
    }
}

Category Outcome::classify() const {
    Moments m = moments();
    if (m.mean_neg == num::ExtReal::of(0.0)) return Category::B;
    if (m.mean_neg >= m.mean_pos) return Category::C;
    // Gains dominate; A needs a positive exponential-moment radius.
    if (m.mgf_radius > num::ExtReal::of(0.0)) return Category::A;
    return Category::D;
}

Outcome Outcome::mean_preserving_spread(size_t atom_index, double eps) const {
    const auto* d = std::get_if<DiscreteRep>(&rep_);
    if (!d) throw domain_error("mean_preserving_spread: finite discrete only");
    if (atom_index >= d->atoms.size())
        throw domain_error("mean_preserving_spread: atom index out of range");
    if (!std::isfinite(eps) || eps <= 0.0)
        throw domain_error("mean_preserving_spread: eps must be positive");
    std::vector<Atom> atoms;
    atoms.reserve(d->atoms.size() + 1);
    for (size_t i = 0; i < d->atoms.size(); ++i) {
        if (i == atom_index) {
            atoms.push_back({d->atoms[i].value - eps, 0.5 * d->atoms[i].prob});
            atoms.push_back({d->atoms[i].value + eps, 0.5 * d->atoms[i].prob});
        } else {
            atoms.push_back(d->atoms[i]);
        }
    }
    return discrete(std::move(atoms));
}

} // namespace dualrisk::out
