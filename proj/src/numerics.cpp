#include "dualrisk/numerics.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace dualrisk::num {

namespace {

bool check_probe(double x, const char* who) {
    if (std::isnan(x)) throw non_finite(std::string(who) + ": NaN probe");
    return true;
}

} // namespace

RootResult find_root_monotone(const std::function<bool(double)>& pred, Bracket b,
                              double tol) {
    if (!(b.lo <= b.hi)) throw invalid_bracket("find_root_monotone: lo > hi");
    if (!(tol > 0.0)) throw domain_error("find_root_monotone: tol must be positive");
    if (!pred(b.lo)) throw invalid_bracket("find_root_monotone: pred(lo) is false");
    if (pred(b.hi)) throw invalid_bracket("find_root_monotone: pred(hi) is true");

    double lo = b.lo, hi = b.hi;
    bool degenerate = (hi - lo) <= tol;
    int iters = 0;
    while (hi - lo > tol) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break; // bracket at floating resolution
        if (pred(mid)) lo = mid; else hi = mid;
        ++iters;
    }
    return RootResult{lo + 0.5 * (hi - lo), lo, hi, iters, degenerate};
}

ContinuousRootResult find_root_continuous(const std::function<double(double)>& f,
                                          Bracket b, double tol) {
    if (!(b.lo <= b.hi)) throw invalid_bracket("find_root_continuous: lo > hi");
    if (!(tol > 0.0)) throw domain_error("find_root_continuous: tol must be positive");
    double lo = b.lo, hi = b.hi;
    double flo = f(lo), fhi = f(hi);
    check_probe(flo, "find_root_continuous");
    check_probe(fhi, "find_root_continuous");
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0.0) == (fhi > 0.0))
        throw no_sign_change("find_root_continuous: no sign change over bracket");

    int iters = 0;
    bool force_bisect = false;
    while (hi - lo > tol) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        double cand = mid;
        // Secant step off the bracket endpoints, taken only when it lands
        // strictly inside; every other iteration bisects so worst-case cost
        // stays within 2x plain bisection.
        if (!force_bisect && std::isfinite(flo) && std::isfinite(fhi) && fhi != flo) {
            double s = hi - fhi * (hi - lo) / (fhi - flo);
            double margin = 0.01 * (hi - lo);
            if (s > lo + margin && s < hi - margin) cand = s;
        }
        double fc = f(cand);
        check_probe(fc, "find_root_continuous");
        if (fc == 0.0) return {cand, 0.0, iters};
        if ((fc > 0.0) == (flo > 0.0)) {
            lo = cand;
            flo = fc;
        } else {
            hi = cand;
            fhi = fc;
        }
        force_bisect = !force_bisect;
        ++iters;
    }
    double root = lo + 0.5 * (hi - lo);
    return {root, std::abs(flo) < std::abs(fhi) ? flo : fhi, iters};
}

double lambert_w(double z) {
    if (std::isnan(z)) throw non_finite("lambert_w: NaN");
    if (z < 0.0) throw domain_error("lambert_w: argument must be nonnegative");
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) throw domain_error("lambert_w: argument must be finite");
    if (z > M_E) return lambert_w_ln(std::log(z));

    // Halley on w e^w - z from a small-argument seed; w in [0, 1] here.
    double w = z / (1.0 + z);
    for (int it = 0; it < 50; ++it) {
        double ew = std::exp(w);
        double r = w * ew - z;
        double denom = ew * (w + 1.0) - (w + 2.0) * r / (2.0 * w + 2.0);
        double dw = r / denom;
        double next = w - dw;
        // stall at the last ulp counts as converged
        if (next == w || std::abs(dw) <= 4e-16 * (1.0 + std::abs(w))) return next;
        w = next;
    }
    throw non_convergent("lambert_w: Halley failed to settle");
}

double lambert_w_ln(double ln_z) {
    if (std::isnan(ln_z)) throw non_finite("lambert_w_ln: NaN");
    if (ln_z <= 1.0) return lambert_w(std::exp(ln_z));
    // Newton on g(w) = w + ln w - ln_z; g is increasing and convex in 1/w,
    // so from w0 >= root the iteration is monotone.
    double w = ln_z - std::log(ln_z) + std::log(ln_z) / ln_z;
    if (w <= 0.0) w = ln_z;
    for (int it = 0; it < 60; ++it) {
        double g = w + std::log(w) - ln_z;
        double dw = g / (1.0 + 1.0 / w);
        double next = w - dw;
        // the residual carries ~eps * ln_z of rounding noise, so accept a
        // last-ulp stall as converged
        if (next == w || std::abs(dw) <= 4e-16 * std::max(w, ln_z)) return next;
        w = next;
    }
    throw non_convergent("lambert_w_ln: Newton failed to settle");
}

namespace {

QuadratureRule build_gauss_hermite(int n) {
    // Physicists' nodes by Newton on the orthonormal recurrence, largest root
    // first with the classical initial guesses, then rescaled to
    // standard-normal coordinates.
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];

        double pp = 0.0;
        for (int it = 0;; ++it) {
            if (it > 100) throw non_convergent("gauss_hermite: Newton stalled");
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) <= 1e-14) break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if (n % 2 == 1) x[m - 1] = 0.0;

    // x runs largest-to-smallest; store ascending, convert physicists' nodes
    // to standard-normal coordinates (z*sqrt(2)), normalize weights to sum 1.
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) wsum += w[i];
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = x[n - 1 - i] * std::sqrt(2.0);
        rule.weights[i] = w[n - 1 - i] / wsum;
    }
    return rule;
}

} // namespace

const QuadratureRule& QuadratureRule::gauss_hermite(int n) {
    if (n < 2) throw domain_error("gauss_hermite: need at least 2 nodes");
    static std::mutex mu;
    static std::map<int, QuadratureRule> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_hermite(n)).first;
    return it->second;
}

ExtReal gauss_expectation(const std::function<double(double)>& g,
                          const QuadratureRule& rule) {
    double acc = 0.0, comp = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        double v = g(rule.nodes[i]);
        if (std::isnan(v)) throw non_finite("gauss_expectation: NaN node value");
        if (std::isinf(v)) {
            if (v < 0.0) throw non_finite("gauss_expectation: -inf node value");
            return ExtReal::inf();
        }
        double t = rule.weights[i] * v;
        // Kahan accumulation keeps node-order rounding out of tight tolerances.
        double y = t - comp;
        double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    if (std::isinf(acc)) return ExtReal::inf();
    return ExtReal::of(acc);
}

CheckedExpectation gauss_expectation_checked(const std::function<double(double)>& g,
                                             int nodes, double rel_tol) {
    ExtReal coarse = gauss_expectation(g, QuadratureRule::gauss_hermite(nodes));
    ExtReal fine = gauss_expectation(g, QuadratureRule::gauss_hermite(2 * nodes));
    if (coarse.is_inf() && fine.is_inf()) return {fine, true, 0.0};
    if (coarse.is_inf() || fine.is_inf())
        return {ExtReal::inf(), false, std::numeric_limits<double>::infinity()};
    double scale = std::max({1.0, std::abs(coarse.get()), std::abs(fine.get())});
    double rel = std::abs(fine.get() - coarse.get()) / scale;
    return {fine, rel <= rel_tol, rel};
}

namespace {

// 32-point Gauss-Legendre nodes/weights on [-1, 1], built once by Newton on
// the Legendre recurrence.
struct GL32 {
    double x[32];
    double w[32];
    GL32() {
        const int n = 32;
        const int m = (n + 1) / 2;
        for (int i = 0; i < m; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double z1, pp;
            do {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                z1 = z;
                z = z1 - p1 / pp;
            } while (std::abs(z - z1) > 1e-15);
            x[i] = -z;
            x[n - 1 - i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            w[n - 1 - i] = w[i];
        }
    }
};

const GL32& gl32() {
    static GL32 rule;
    return rule;
}

} // namespace

double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int npanels) {
    if (npanels < 1) throw domain_error("gauss_legendre: npanels must be >= 1");
    const GL32& rule = gl32();
    double acc = 0.0;
    double h = (b - a) / npanels;
    for (int p = 0; p < npanels; ++p) {
        double lo = a + p * h;
        double mid = lo + 0.5 * h, half = 0.5 * h;
        double s = 0.0;
        for (int i = 0; i < 32; ++i) s += rule.w[i] * f(mid + half * rule.x[i]);
        acc += s * half;
    }
    if (std::isnan(acc)) throw non_finite("gauss_legendre: NaN integral");
    return acc;
}

namespace {

// G(p, a) = int_a^inf u^{-p} e^{-u} du for a > 0. Large a: Gauss-Legendre over
// a truncated range (the integrand decays like e^{-u}). Small a: Taylor-expand
// e^{-u} on [a, 1] so the near-singular u^{-p} factor integrates exactly;
// expm1 keeps the antiderivative stable when an exponent k+1-p is near zero.
double tail_integral_from_one(double p) {
    auto f = [p](double u) { return std::exp(-p * std::log(u) - u); };
    double acc = 0.0;
    const double edges[] = {1.0, 3.0, 7.0, 15.0, 31.0, 76.0};
    for (size_t i = 0; i + 1 < std::size(edges); ++i)
        acc += gauss_legendre(f, edges[i], edges[i + 1], 2);
    return acc;
}

double upper_gamma_integral(double p, double a) {
    if (a >= 1.0) {
        auto f = [p](double u) { return std::exp(-p * std::log(u) - u); };
        double acc = 0.0;
        const double widths[] = {1.0, 2.0, 4.0, 8.0, 16.0, 44.0};
        double lo = a;
        for (double wd : widths) {
            acc += gauss_legendre(f, lo, lo + wd, 2);
            lo += wd;
        }
        return acc;
    }
    double ln_a = std::log(a);
    double acc = tail_integral_from_one(p);
    double kfact_inv = 1.0, sign = 1.0;
    for (int k = 0; k <= 45; ++k) {
        if (k > 0) {
            kfact_inv /= k;
            sign = -sign;
        }
        double delta = k + 1.0 - p;
        double jk = (std::abs(delta) < 1e-12) ? -ln_a : -std::expm1(delta * ln_a) / delta;
        acc += sign * kfact_inv * jk;
    }
    return acc;
}

} // namespace

ExtReal exp_power_tail_sum(double p, double eps) {
    if (std::isnan(p) || std::isnan(eps)) throw non_finite("exp_power_tail_sum: NaN");
    if (p <= -2.0) throw domain_error("exp_power_tail_sum: p must exceed -2");
    if (eps < 0.0) return ExtReal::inf();
    if (eps == 0.0 && p <= 1.0) return ExtReal::inf();

    const bool direct = (eps >= 1e-3) || (p >= 6.0);
    if (direct) {
        double acc = 0.0, comp = 0.0;
        // terms may grow before decaying when p < 0; bounds apply past n0
        const double n0 = (p < 0.0 && eps > 0.0) ? std::ceil(-2.0 * p / eps) : 1.0;
        const double geo = (eps > 0.0) ? 1.0 / std::expm1(0.5 * eps) : 0.0;
        for (long n = 1; n <= 2'000'000; ++n) {
            double t = std::exp(-p * std::log(static_cast<double>(n)) - eps * n);
            double y = t - comp;
            double s = acc + y;
            comp = (s - acc) - y;
            acc = s;
            if (n < n0) continue;
            double bound = std::numeric_limits<double>::infinity();
            if (p > 1.0) bound = t * n / (p - 1.0);
            if (eps > 0.0) bound = std::min(bound, t * geo);
            if (bound < 1e-16 * acc) return ExtReal::of(acc + bound);
        }
        // unreachable for routed inputs; fall through to the expansion
    }

    // Euler-Maclaurin with B2/B4 corrections about N; the remaining error is
    // O((p/N + eps)^5 f(N)) which is below double resolution here.
    const long N = 3000;
    double acc = 0.0, comp = 0.0;
    for (long n = 1; n < N; ++n) {
        double t = std::exp(-p * std::log(static_cast<double>(n)) - eps * n);
        double y = t - comp;
        double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    const double dn = static_cast<double>(N);
    const double fN = std::exp(-p * std::log(dn) - eps * dn);
    double integral;
    if (eps == 0.0) {
        integral = std::pow(dn, 1.0 - p) / (p - 1.0);
    } else {
        integral = std::exp((p - 1.0) * std::log(eps)) * upper_gamma_integral(p, eps * dn);
    }
    const double f1 = -(p / dn + eps) * fN;
    const double f3 = -(eps * eps * eps + 3.0 * p * eps * eps / dn +
                        3.0 * p * (p + 1.0) * eps / (dn * dn) +
                        p * (p + 1.0) * (p + 2.0) / (dn * dn * dn)) *
                      fN;
    double total = acc + integral + 0.5 * fN - f1 / 12.0 + f3 / 720.0;
    return ExtReal::of(total);
}

} // namespace dualrisk::num
