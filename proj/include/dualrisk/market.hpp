#pragma once

#include <functional>
#include <vector>

#include "dualrisk/numerics.hpp"
#include "dualrisk/outcomes.hpp"

namespace dualrisk::mkt {

/// Complete-market pricing kernel rho > 0 with E[rho] = 1.
/// Lognormal: ln rho ~ N(-sigma2/2, sigma2), so the normalization is built
/// in. Discrete: explicit (value, prob) atoms; E[rho] = 1 is required of the
/// input within 1e-9 and never repaired by rescaling values, since that
/// would silently change prices.
class Market {
  public:
    enum class Kind { Lognormal, Discrete };

    static Market lognormal(double sigma2, int quad_nodes = 128);
    static Market discrete(std::vector<out::Atom> atoms);

    Kind kind() const { return kind_; }
    double sigma2() const;                      // lognormal only
    const std::vector<out::Atom>& atoms() const; // discrete only
    int quad_nodes() const { return quad_nodes_; }

    double entropy() const;  // E[rho ln rho], >= 0, > 0 unless rho == 1 a.s.
    double log_mean() const; // E[ln rho]
    double ess_inf() const;  // essential infimum of rho (0 for lognormal)

    /// E[h(rho)] and E[rho h(rho)]: exact sums for discrete kernels,
    /// Gauss-Hermite quadrature for lognormal ones. A +inf value of h at any
    /// atom or node makes the expectation +inf; NaN raises.
    num::ExtReal expect(const std::function<double(double)>& h) const;
    num::ExtReal expect_rho(const std::function<double(double)>& h) const;

    /// rho as a function of the standard-normal coordinate (lognormal only);
    /// used to push optimal payoffs forward into outcome laws.
    double rho_of_z(double z) const;

  private:
    Market() = default;
    Kind kind_ = Kind::Lognormal;
    double sigma2_ = 0.0;
    double mu_ = 0.0;
    int quad_nodes_ = 128;
    std::vector<out::Atom> atoms_;
};

} // namespace dualrisk::mkt
