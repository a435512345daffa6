#pragma once

#include <functional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "thetacbc/distributions.hpp"
#include "thetacbc/rng.hpp"

namespace thetacbc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Euclidean unit ball in R^dimension.
struct UnitBall {
    int dimension;
};

/// Convex kernel given by its support function and Minkowski gauge.
///
/// Both callbacks must be re-entrant. `tag` identifies the shape for kernel
/// equality (two oracles with the same non-empty tag are the same set).
struct SupportOracle {
    int dimension;
    std::function<double(const Vector&)> support;
    std::function<double(const Vector&)> gauge;
    std::string tag;
    bool symmetric = true;
};

/// Convex template R that gets scaled by (nominal size + perturbation) and
/// translated to a center. Must contain the origin.
class ShapeKernel {
public:
    ShapeKernel(UnitBall ball);
    ShapeKernel(SupportOracle oracle);

    /// Axis-aligned box [-h_1, h_1] x ... x [-h_n, h_n].
    static ShapeKernel box(const Vector& half_widths);
    /// The unit ball expressed through the oracle interface (test cross-checks).
    static ShapeKernel ball_oracle(int dimension);

    int dimension() const;
    bool is_unit_ball() const { return std::holds_alternative<UnitBall>(kernel_); }
    bool is_symmetric() const;
    const std::string& tag() const;

    /// Box half-widths when this kernel came from box(), empty otherwise.
    const Vector& box_half_widths() const { return box_half_widths_; }

    double support_unchecked(const Vector& v) const;
    double gauge(const Vector& y) const;

    friend bool operator==(const ShapeKernel& a, const ShapeKernel& b);

private:
    std::variant<UnitBall, SupportOracle> kernel_;
    Vector box_half_widths_;
};

/// c (+) (s + theta) R with theta drawn from `perturbation`.
struct UncertainSet {
    Vector center;
    double nominal_size;
    ShapeKernel kernel;
    ScalarDistribution perturbation;

    int dimension() const { return static_cast<int>(center.size()); }
    void validate() const;
};

/// H_R(v) for a unit direction v. Throws ContractViolation when |v| != 1.
double support(const ShapeKernel& kernel, const Vector& v);

/// ||q - p||_R, or +infinity when q - p lies outside every scaling of R.
double gauge_distance(const ShapeKernel& kernel, const Vector& p, const Vector& q);

/// Largest distance from the origin to a point of c (+) (s + theta) R.
double d_init_max(const UncertainSet& set, double theta);

struct UnsafeDistance {
    double value;
    /// The origin lies inside the inflated set; value was clamped to 0.
    bool origin_inside;
};

/// Smallest distance from the origin to c (+) (s + theta) R, clamped at 0.
UnsafeDistance d_unsafe_min(const UncertainSet& set, double theta);

bool contains(const UncertainSet& set, double theta, const Vector& x);

/// Uniform draw from c (+) (s + theta) R.
Vector sample_uniform(const UncertainSet& set, double theta, RandomStream& stream);

}  // namespace thetacbc
