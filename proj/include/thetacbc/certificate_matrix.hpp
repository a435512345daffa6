#pragma once

#include <Eigen/Dense>

namespace thetacbc {

using Matrix = Eigen::MatrixXd;

/// Eigenvalues of P_x and P_theta must exceed this for P to count as definite.
inline constexpr double kDefiniteTolerance = 1e-9;

/// B(z) = z' diag(P_x, P_theta) z on z = (x, theta_i, theta_u).
struct CertificateMatrix {
    Matrix P_x;
    Matrix P_theta;

    /// Block-diagonal assembly of the full (n+2)x(n+2) matrix.
    Matrix full() const;

    /// Throws ValidationError/ShapeError unless both blocks are symmetric
    /// within 1e-9 and positive definite.
    void validate() const;

    CertificateMatrix scaled(double alpha) const { return {alpha * P_x, alpha * P_theta}; }
};

inline Matrix default_p_theta() { return 1e-6 * Matrix::Identity(2, 2); }

}  // namespace thetacbc
