#include "thetacbc/scenario.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "thetacbc/errors.hpp"

namespace thetacbc {

namespace {

void require_definite(const Matrix& M, const char* name) {
    if (M.rows() != M.cols()) {
        throw ShapeError(std::string(name) + " must be square");
    }
    if (!M.allFinite()) {
        throw ValidationError(std::string(name) + " must be finite");
    }
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw ValidationError(std::string(name) + " must be symmetric");
    }
    const double lo = Eigen::SelfAdjointEigenSolver<Matrix>(M).eigenvalues().minCoeff();
    if (!(lo > kDefiniteTolerance)) {
        std::ostringstream msg;
        msg << name << " must be positive definite (smallest eigenvalue " << lo << ")";
        throw ValidationError(msg.str());
    }
}

ScalarDistribution perturbation_for(double sigma) {
    if (sigma == 0.0) {
        return ScalarDistribution(Degenerate{0.0});
    }
    return ScalarDistribution(HalfNormal{sigma});
}

}  // namespace

Matrix CertificateMatrix::full() const {
    const auto n = P_x.rows();
    Matrix P = Matrix::Zero(n + 2, n + 2);
    P.topLeftCorner(n, n) = P_x;
    P.bottomRightCorner(2, 2) = P_theta;
    return P;
}

void CertificateMatrix::validate() const {
    if (P_theta.rows() != 2 || P_theta.cols() != 2) {
        throw ShapeError("P_theta must be 2x2");
    }
    require_definite(P_x, "P_x");
    require_definite(P_theta, "P_theta");
}

Matrix SigmaPowerPTheta::evaluate(double sigma_i) const {
    double p22 = p11;
    if (sigma_i > 0.0) {
        const double exponent = (1.0 / sigma_i - 1.0) / std::pow(sigma_i, 1.9);
        p22 = std::max(floor, std::exp(std::log(scale) + exponent * std::log(sigma_i)));
    }
    Matrix P = Matrix::Zero(2, 2);
    P(0, 0) = p11;
    P(1, 1) = p22;
    return P;
}

void Scenario::validate() const {
    system.validate();
    const int n = system.state_dim();
    const int m = system.input_dim();
    if (gain) {
        if (gain->L.rows() != m || gain->L.cols() != n) {
            std::ostringstream msg;
            msg << "gain L must be " << m << "x" << n;
            throw ShapeError(msg.str());
        }
        if (!gain->L.allFinite()) {
            throw ValidationError("gain L must be finite");
        }
    }
    if (certificate) {
        if (certificate->P_x) {
            if (certificate->P_x->rows() != n || certificate->P_x->cols() != n) {
                throw ShapeError("P_x must match the state dimension");
            }
            require_definite(*certificate->P_x, "P_x");
        }
        if (certificate->P_theta) {
            if (const auto* M = std::get_if<Matrix>(&*certificate->P_theta)) {
                if (M->rows() != 2 || M->cols() != 2) {
                    throw ShapeError("P_theta must be 2x2");
                }
                require_definite(*M, "P_theta");
            } else {
                const auto& rule = std::get<SigmaPowerPTheta>(*certificate->P_theta);
                if (!(rule.p11 > kDefiniteTolerance) || !(rule.scale > 0.0) ||
                    !(rule.floor > kDefiniteTolerance)) {
                    throw ValidationError("P_theta rule needs p11, scale, floor above tolerance");
                }
            }
        }
    }
    init_set.validate();
    unsafe_set.validate();
    if (init_set.dimension() != n || unsafe_set.dimension() != n) {
        throw ShapeError("set centers must have the state dimension");
    }
    if (horizon < 1) {
        throw ValidationError("horizon must be a positive integer");
    }
    if (state_bounds) {
        if (state_bounds->lower.size() != n || state_bounds->upper.size() != n) {
            throw ShapeError("state bounds must have the state dimension");
        }
        if (!(state_bounds->lower.array() <= state_bounds->upper.array()).all()) {
            throw ValidationError("state bounds lower must not exceed upper");
        }
    }
    synthesis.validate(n, m);
    if (sweep) {
        for (const auto* list : {&sweep->sigma_w, &sweep->sigma_i, &sweep->sigma_u}) {
            for (double s : *list) {
                if (!(s >= 0.0) || !std::isfinite(s)) {
                    throw ValidationError("sweep sigmas must be nonnegative and finite");
                }
            }
        }
    }
}

Scenario Scenario::with_noise(double sigma_w, double sigma_i, double sigma_u) const {
    Scenario out = *this;
    out.system.sigma_w = sigma_w;
    out.system.sigma_w_axes.reset();
    out.init_set.perturbation = perturbation_for(sigma_i);
    out.unsafe_set.perturbation = perturbation_for(sigma_u);
    return out;
}

ResolvedScenario resolve(const Scenario& scenario) {
    scenario.validate();
    ResolvedScenario out{scenario, FeedbackGain{}, CertificateMatrix{}, Matrix{}, false, false};
    if (scenario.gain) {
        out.gain = *scenario.gain;
    } else {
        out.gain = synthesize_gain(scenario.system, scenario.synthesis);
        out.gain_synthesized = true;
    }
    out.a_cl = closed_loop(scenario.system, out.gain);

    const CertificateSpec spec = scenario.certificate.value_or(CertificateSpec{});
    if (spec.P_x) {
        out.certificate.P_x = *spec.P_x;
    } else {
        out.certificate.P_x = solve_certificate(out.a_cl, scenario.synthesis).P_x;
        out.certificate_synthesized = true;
    }
    if (!spec.P_theta) {
        out.certificate.P_theta = default_p_theta();
    } else if (const auto* M = std::get_if<Matrix>(&*spec.P_theta)) {
        out.certificate.P_theta = *M;
    } else {
        const double sigma_i = scenario.init_set.perturbation.scale_parameter();
        out.certificate.P_theta = std::get<SigmaPowerPTheta>(*spec.P_theta).evaluate(sigma_i);
    }
    out.certificate.validate();
    return out;
}

}  // namespace thetacbc
