#pragma once

#include <optional>

#include <Eigen/Dense>

#include "thetacbc/distributions.hpp"

namespace thetacbc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// x_{k+1} = A x_k + B u_k + w_k with w_k ~ N(0, diag(noise_std)^2).
struct LinearSystem {
    Matrix A;
    Matrix B;
    /// Isotropic per-axis standard deviation of w_k.
    double sigma_w = 0.0;
    /// Optional per-axis override of sigma_w (anisotropic noise). Off by default.
    std::optional<Vector> sigma_w_axes;

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }

    /// Per-axis noise standard deviations.
    Vector noise_std() const;

    void validate() const;
};

struct FeedbackGain {
    Matrix L;
};

/// Dynamics on z = (x, theta_i, theta_u): z_{k+1} = A_bar z_k + D_bar w_k.
struct AugmentedSystem {
    Matrix A_bar;
    Matrix D_bar;
    /// Diagonal of E[w w^T]: noise variances, then E[theta_i^2], E[theta_u^2].
    Vector noise_second_moment;
    int base_dim = 0;

    int dim() const { return base_dim + 2; }
    Matrix Sigma_w_bar() const { return noise_second_moment.asDiagonal(); }
};

/// A + B L.
Matrix closed_loop(const LinearSystem& sys, const FeedbackGain& gain);

AugmentedSystem build_augmented(const LinearSystem& sys, const FeedbackGain& gain,
                                const ScalarDistribution& theta_i_dist,
                                const ScalarDistribution& theta_u_dist);

/// A_bar z + D_bar noise.
Vector step(const AugmentedSystem& aug, const Vector& z, const Vector& noise);

double spectral_radius(const Matrix& M);

}  // namespace thetacbc
