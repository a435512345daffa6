#include "thetacbc/synthesis.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "thetacbc/errors.hpp"

namespace thetacbc {

namespace {

void require_symmetric(const Matrix& M, const char* name) {
    if (M.rows() != M.cols()) {
        throw ShapeError(std::string(name) + " must be square");
    }
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw ValidationError(std::string(name) + " must be symmetric");
    }
}

}  // namespace

void SynthesisConfig::validate(int state_dim, int input_dim) const {
    if (state_weight) {
        require_symmetric(*state_weight, "state_weight");
        if (state_weight->rows() != state_dim) {
            throw ShapeError("state_weight must be n x n");
        }
        if (Eigen::SelfAdjointEigenSolver<Matrix>(*state_weight).eigenvalues().minCoeff() < -1e-12) {
            throw ValidationError("state_weight must be positive semidefinite");
        }
    }
    if (input_weight) {
        require_symmetric(*input_weight, "input_weight");
        if (input_weight->rows() != input_dim) {
            throw ShapeError("input_weight must be m x m");
        }
        if (Eigen::SelfAdjointEigenSolver<Matrix>(*input_weight).eigenvalues().minCoeff() <= 0.0) {
            throw ValidationError("input_weight must be positive definite");
        }
    }
    if (lyapunov_rhs) {
        require_symmetric(*lyapunov_rhs, "lyapunov_rhs");
        if (lyapunov_rhs->rows() != state_dim) {
            throw ShapeError("lyapunov_rhs must be n x n");
        }
        if (Eigen::SelfAdjointEigenSolver<Matrix>(*lyapunov_rhs).eigenvalues().minCoeff() < -1e-12) {
            throw ValidationError("lyapunov_rhs must be positive semidefinite");
        }
    }
    if (max_iterations < 1 || !(convergence_tol > 0.0)) {
        throw ValidationError("max_iterations and convergence_tol must be positive");
    }
}

FeedbackGain synthesize_gain(const LinearSystem& sys, const SynthesisConfig& cfg) {
    sys.validate();
    const int n = sys.state_dim();
    const int m = sys.input_dim();
    cfg.validate(n, m);
    const Matrix Q = cfg.state_weight.value_or(Matrix::Identity(n, n));
    const Matrix R = cfg.input_weight.value_or(Matrix::Identity(m, m));
    const Matrix& A = sys.A;
    const Matrix& B = sys.B;

    // structured doubling: H_k converges quadratically to the Riccati solution
    const Matrix I = Matrix::Identity(n, n);
    Matrix Ak = A;
    Matrix G = B * R.ldlt().solve(B.transpose());
    Matrix P = Q;
    bool converged = false;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        const Eigen::PartialPivLU<Matrix> W(I + G * P);
        const Matrix WA = W.solve(Ak);
        const Matrix WG = W.solve(G);
        Matrix next = P + Ak.transpose() * P * WA;
        next = (0.5 * (next + next.transpose())).eval();
        G = G + Ak * WG * Ak.transpose();
        G = (0.5 * (G + G.transpose())).eval();
        Ak = Ak * WA;
        if (!next.allFinite() || !G.allFinite() || !Ak.allFinite()) {
            break;
        }
        const double change = (next - P).norm();
        const double scale = std::max(1.0, next.norm());
        P = std::move(next);
        if (change <= cfg.convergence_tol * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw UnstabilizableError(
            "Riccati iteration did not converge; (A, B) appears unstabilizable");
    }
    const Matrix BtP = B.transpose() * P;
    FeedbackGain gain{-(R + BtP * B).ldlt().solve(BtP * A)};
    const double rho = spectral_radius(A + B * gain.L);
    if (!(rho < 1.0)) {
        std::ostringstream msg;
        msg << "Riccati gain leaves spectral radius " << rho << " >= 1";
        throw UnstabilizableError(msg.str());
    }
    return gain;
}

LyapunovCertificate solve_certificate(const Matrix& a_cl, const SynthesisConfig& cfg) {
    if (a_cl.rows() != a_cl.cols() || a_cl.rows() < 1) {
        throw ShapeError("solve_certificate: closed-loop matrix must be square");
    }
    const int n = static_cast<int>(a_cl.rows());
    cfg.validate(n, 1);
    const double rho = spectral_radius(a_cl);
    if (!(rho < 1.0)) {
        std::ostringstream msg;
        msg << "closed loop has spectral radius " << rho << " >= 1; no quadratic certificate";
        throw NoCertificateError(msg.str());
    }
    const Matrix Q = cfg.lyapunov_rhs.value_or(Matrix::Zero(n, n)) +
                     kLyapunovRegularization * Matrix::Identity(n, n);

    // vec(A' X A) = (A' (x) A') vec(X), so (I - A' (x) A') vec(X) = vec(Q).
    const int nn = n * n;
    Matrix K = Matrix::Identity(nn, nn);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            K.block(i * n, j * n, n, n) -= a_cl(j, i) * a_cl.transpose();
        }
    }
    const Vector q = Eigen::Map<const Vector>(Q.data(), nn);
    const Vector x = K.partialPivLu().solve(q);
    Matrix X = Eigen::Map<const Matrix>(x.data(), n, n);
    X = (0.5 * (X + X.transpose())).eval();

    LyapunovCertificate out;
    const Matrix residual = a_cl.transpose() * X * a_cl - X + Q;
    out.relative_residual = residual.norm() / Q.norm();
    out.trace_scale = X.trace();
    out.P_x = X / out.trace_scale;
    return out;
}

}  // namespace thetacbc
