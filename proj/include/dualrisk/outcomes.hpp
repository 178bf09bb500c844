#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "dualrisk/numerics.hpp"

namespace dualrisk::out {

struct Atom {
    double value;
    double prob;
};

struct Moments {
    num::ExtReal mean_pos;   // E[X+]
    num::ExtReal mean_neg;   // E[X-]
    num::ExtReal mgf_radius; // sup{eps >= 0 : E[e^{eps X-}] < inf}
};

/// Risk classification of an outcome law.
///  A: gains dominate losses in mean and the loss tail has an exponential
///     moment; the duality index is finite and positive.
///  B: no losses at all; index 0.
///  C: losses dominate gains in mean; index +inf.
///  D: gains dominate but the loss tail admits no exponential moment;
///     index +inf.
enum class Category { A, B, C, D };

const char* category_name(Category c);

/// Optional metadata for a standard-normal push-forward law X = g(Z).
///
/// Quadrature cannot see tail growth beyond its last node, so the loss-side
/// exponential-moment radius is declared, not estimated. The default (+inf)
/// is correct for maps whose loss side grows at most linearly in |z|; maps
/// with faster loss growth must declare their radius.
struct NormalMapInfo {
    num::ExtReal mgf_radius = num::ExtReal::inf();
    int quad_nodes = 64;
    std::string label;
};

/// Outcome distribution: the law of a gamble's net result.
///
/// Three representations:
///  - finite discrete atoms;
///  - exponential-power loss tail P(X = -n) = c n^{-p} e^{-rn}, n >= 1,
///    plus finitely many head atoms (the tail may be affinely transformed
///    by scale/shift, which keeps mgf and moments exact);
///  - push-forward of a standard normal by a piecewise-smooth map.
class Outcome {
  public:
    enum class Kind { Discrete, ExpTail, NormalMap };

    /// Finite discrete law. Values must be finite, probabilities positive and
    /// summing to 1 within 1e-9 (then renormalized). Atoms are sorted and
    /// duplicate values merged, so laws equal up to permutation compare and
    /// evaluate identically.
    static Outcome discrete(std::vector<Atom> atoms);

    /// Exponential-power tail with decay r >= 0, power p >= 0, scale c > 0,
    /// plus head atoms. r == 0 (pure power tail) requires p > 1 so the tail
    /// mass converges. Head mass plus tail mass must be 1 within 1e-9
    /// (then renormalized).
    static Outcome exp_tail(double r, double p, double c, std::vector<Atom> head);

    /// Same, with a single head atom at head_value absorbing all mass the
    /// tail does not carry.
    static Outcome exp_tail_with_rest(double r, double p, double c, double head_value);

    /// Law of g(Z), Z standard normal. See NormalMapInfo for the declared
    /// loss-radius contract.
    static Outcome normal_map(std::function<double(double)> g, NormalMapInfo info = {});

    Kind kind() const;

    /// E[X+], E[X-] and the loss-side exponential-moment radius.
    /// Discrete laws: exact sums. Tail laws: series evaluation, +inf where the
    /// series diverges. Normal maps: sign-segmented Gauss-Legendre against the
    /// normal density (relative accuracy ~1e-12 for smooth maps).
    Moments moments() const;

    /// E[e^{-alpha X}] for alpha >= 0 as an extended real.
    /// Series or quadrature evaluation; any per-atom or per-node exponent
    /// above 700 log-units collapses to +inf.
    num::ExtReal mgf_neg(double alpha) const;

    Outcome scale(double k) const; // law of kX, k > 0
    Outcome shift(double c) const; // law of X + c

    /// Law of min(max(X, -n), n), n > 0. Tail laws materialize to finite
    /// discrete atoms; atom probabilities below double resolution are dropped.
    Outcome truncate(double n) const;

    /// Law of X + Y for independent X, Y; finite discrete only.
    static Outcome independent_sum(const Outcome& x, const Outcome& y);

    /// Replaces atom i by a half-probability pair at value +- eps: a
    /// mean-preserving spread. Finite discrete only.
    Outcome mean_preserving_spread(size_t atom_index, double eps) const;

    Category classify() const;

    /// Discrete representation access (throws unless kind() == Discrete).
    const std::vector<Atom>& atoms() const;

    /// Evaluates the normal-map function (throws unless kind() == NormalMap).
    double map_at(double z) const;
    const NormalMapInfo& map_info() const;

  private:
    struct DiscreteRep {
        std::vector<Atom> atoms; // sorted by value, probs sum to 1
    };
    struct ExpTailRep {
        double r;      // decay
        double p;      // power
        double c;      // tail scale (renormalized)
        double k = 1;  // affine: X = -k n + c0 on the tail
        double c0 = 0;
        std::vector<Atom> head; // final-space atoms
    };
    struct NormalMapRep {
        std::function<double(double)> g;
        NormalMapInfo info;
    };

    using Rep = std::variant<DiscreteRep, ExpTailRep, NormalMapRep>;
    explicit Outcome(Rep rep) : rep_(std::move(rep)) {}
    Rep rep_;
};

} // namespace dualrisk::out
