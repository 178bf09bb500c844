#pragma once

#include <functional>

namespace dualrisk::util {

/// Utility family: concave, strictly increasing, differentiable, u(0) = 0.
/// Linear u(x) = x; CARA u(x) = 1 - e^{-beta x}; Generic wraps user callables
/// (u, u', and the inverse marginal), validated on a grid at construction.
class Utility {
  public:
    enum class Kind { Linear, Cara, Generic };

    static Utility linear();
    static Utility cara(double beta);
    static Utility generic(std::function<double(double)> u, std::function<double(double)> du,
                           std::function<double(double)> inv_du);

    Kind kind() const { return kind_; }
    double beta() const; // CARA only

    double eval(double x) const;   // u(x)
    double deriv(double x) const;  // u'(x)
    double deriv_at_zero() const;  // u'(0)

    /// (u')^{-1}(m) for m > 0 in the range of u'. Linear marginals are
    /// constant, so the inverse does not exist there.
    double inv_marginal(double m) const;

    /// The Lagrange first-order map t -> -alpha u'(t) e^{-alpha u(t)},
    /// strictly increasing in t with range (-inf, 0). May return -inf when
    /// the exponent overflows (t deep in the loss region).
    double forward_map(double alpha, double t) const;

    /// ln(-forward_map) = ln(alpha) + ln(u'(t)) - alpha u(t); strictly
    /// decreasing in t and overflow-free, used for root finding.
    double forward_map_log(double alpha, double t) const;

    /// I_alpha(x): inverse of forward_map in t, for x < 0, alpha > 0.
    /// Linear and CARA use closed forms (CARA via Lambert W, evaluated in
    /// log space so large alpha cannot overflow); Generic uses a bracketed
    /// root-find on forward_map_log seeded at inv_marginal(-x/alpha).
    double inverse_map(double alpha, double x) const;

  private:
    Utility() = default;
    Kind kind_ = Kind::Linear;
    double beta_ = 0.0;
    std::function<double(double)> u_, du_, inv_du_;
};

} // namespace dualrisk::util
