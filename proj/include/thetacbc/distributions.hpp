#pragma once

#include <string>
#include <variant>
#include <vector>

#include "thetacbc/rng.hpp"

namespace thetacbc {

/// |N(0, sigma^2)|.
struct HalfNormal {
    double sigma;
};

struct Normal {
    double mu;
    double sigma;
};

/// Point mass.
struct Degenerate {
    double value;
};

/// Piecewise-linear density on a sorted grid; zero outside the grid.
struct Tabulated {
    std::vector<double> grid;
    std::vector<double> density;
};

/// One-dimensional law used for set-size perturbations.
///
/// Immutable after construction; the constructor validates the variant's
/// invariants (positive sigma, sorted grid, unit mass within 1e-8).
class ScalarDistribution {
public:
    using Variant = std::variant<HalfNormal, Normal, Degenerate, Tabulated>;

    ScalarDistribution(HalfNormal d);
    ScalarDistribution(Normal d);
    ScalarDistribution(Degenerate d);
    ScalarDistribution(Tabulated d);

    const Variant& variant() const noexcept { return law_; }

    bool is_degenerate() const noexcept { return std::holds_alternative<Degenerate>(law_); }
    bool is_half_normal() const noexcept { return std::holds_alternative<HalfNormal>(law_); }

    double mean() const;
    double second_moment() const;
    double stddev() const;
    double cdf(double x) const;
    double pdf(double x) const;
    double sample(RandomStream& stream) const;

    /// Interval carrying all but a negligible tail of the mass: the exact
    /// support where finite, otherwise mean +/- tail_sigmas * stddev.
    std::pair<double, double> effective_support(double tail_sigmas = 10.0) const;

    /// The sigma parameter for HalfNormal/Normal, 0 for Degenerate and the
    /// standard deviation for Tabulated.
    double scale_parameter() const;

    std::string describe() const;

    friend bool operator==(const ScalarDistribution& a, const ScalarDistribution& b);

private:
    Variant law_;
    // Cumulative mass at each grid node (Tabulated only).
    std::vector<double> cumulative_;
};

/// Number of trapezoid nodes used by sum_cdf's convolution.
inline constexpr int kDefaultConvolutionPoints = 4096;

/// P[X1 + X2 <= x] for independent X1 ~ d1, X2 ~ d2.
///
/// Degenerate operands shift the other CDF exactly and Normal + Normal uses
/// the closed form. Otherwise both orders of the convolution integral
/// F1(x - t) f2(t) dt are evaluated with the trapezoid rule and averaged,
/// which makes the result exactly symmetric in its arguments.
double sum_cdf(const ScalarDistribution& d1, const ScalarDistribution& d2, double x,
               int grid_points = kDefaultConvolutionPoints);

/// The numerical convolution path of sum_cdf, without the closed-form
/// shortcuts. Both laws need a density.
double sum_cdf_convolution(const ScalarDistribution& d1, const ScalarDistribution& d2, double x,
                           int grid_points = kDefaultConvolutionPoints);

}  // namespace thetacbc
