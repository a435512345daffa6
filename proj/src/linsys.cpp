#include "thetacbc/linsys.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "thetacbc/errors.hpp"

namespace thetacbc {

Vector LinearSystem::noise_std() const {
    if (sigma_w_axes) {
        return *sigma_w_axes;
    }
    return Vector::Constant(state_dim(), sigma_w);
}

void LinearSystem::validate() const {
    if (A.rows() < 1 || A.rows() != A.cols()) {
        std::ostringstream msg;
        msg << "A must be square and non-empty, got " << A.rows() << "x" << A.cols();
        throw ShapeError(msg.str());
    }
    if (B.rows() != A.rows() || B.cols() < 1) {
        std::ostringstream msg;
        msg << "B must be " << A.rows() << "xm with m >= 1, got " << B.rows() << "x" << B.cols();
        throw ShapeError(msg.str());
    }
    if (!A.allFinite() || !B.allFinite()) {
        throw ValidationError("A and B must be finite");
    }
    if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w)) {
        throw ValidationError("sigma_w must be a nonnegative finite number");
    }
    if (sigma_w_axes) {
        if (sigma_w_axes->size() != A.rows()) {
            throw ShapeError("sigma_w_axes length must equal the state dimension");
        }
        if (!(sigma_w_axes->array() >= 0.0).all() || !sigma_w_axes->allFinite()) {
            throw ValidationError("sigma_w_axes entries must be nonnegative and finite");
        }
    }
}

Matrix closed_loop(const LinearSystem& sys, const FeedbackGain& gain) {
    if (gain.L.rows() != sys.B.cols() || gain.L.cols() != sys.A.rows()) {
        std::ostringstream msg;
        msg << "gain L must be " << sys.B.cols() << "x" << sys.A.rows() << ", got "
            << gain.L.rows() << "x" << gain.L.cols();
        throw ShapeError(msg.str());
    }
    if (sys.B.rows() != sys.A.rows()) {
        throw ShapeError("B row count must equal the state dimension");
    }
    return sys.A + sys.B * gain.L;
}

AugmentedSystem build_augmented(const LinearSystem& sys, const FeedbackGain& gain,
                                const ScalarDistribution& theta_i_dist,
                                const ScalarDistribution& theta_u_dist) {
    const Matrix a_cl = closed_loop(sys, gain);
    const int n = sys.state_dim();
    AugmentedSystem aug;
    aug.base_dim = n;
    aug.A_bar = Matrix::Zero(n + 2, n + 2);
    aug.A_bar.topLeftCorner(n, n) = a_cl;
    aug.D_bar = Matrix::Identity(n + 2, n + 2);
    aug.noise_second_moment.resize(n + 2);
    aug.noise_second_moment.head(n) = sys.noise_std().array().square();
    aug.noise_second_moment(n) = theta_i_dist.second_moment();
    aug.noise_second_moment(n + 1) = theta_u_dist.second_moment();
    return aug;
}

Vector step(const AugmentedSystem& aug, const Vector& z, const Vector& noise) {
    if (z.size() != aug.A_bar.cols() || noise.size() != aug.D_bar.cols()) {
        std::ostringstream msg;
        msg << "step: expected vectors of length " << aug.A_bar.cols() << ", got " << z.size()
            << " and " << noise.size();
        throw ShapeError(msg.str());
    }
    return aug.A_bar * z + aug.D_bar * noise;
}

double spectral_radius(const Matrix& M) {
    Eigen::EigenSolver<Matrix> solver(M, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace thetacbc
