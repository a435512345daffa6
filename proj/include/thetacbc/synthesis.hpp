#pragma once

#include <optional>

#include "thetacbc/linsys.hpp"

namespace thetacbc {

/// Weights for the Riccati gain and the Lyapunov certificate. Unset weights
/// default to identity (state/input) and zero (Lyapunov right-hand side).
struct SynthesisConfig {
    std::optional<Matrix> state_weight;
    std::optional<Matrix> input_weight;
    std::optional<Matrix> lyapunov_rhs;
    int max_iterations = 10000;
    double convergence_tol = 1e-12;

    void validate(int state_dim, int input_dim) const;
};

/// Added to the Lyapunov right-hand side so the decrease is strict.
inline constexpr double kLyapunovRegularization = 1e-9;

/// Stabilizing state feedback u = L x from the discrete-time algebraic Riccati
/// fixed point. Throws UnstabilizableError when the iteration does not
/// converge or the result leaves rho(A + B L) >= 1.
FeedbackGain synthesize_gain(const LinearSystem& sys, const SynthesisConfig& cfg = {});

struct LyapunovCertificate {
    /// Solution normalized to unit trace.
    Matrix P_x;
    /// Trace of the raw solution; P_x * trace_scale solves the equation.
    double trace_scale = 1.0;
    /// ||A' X A - X + Q||_F / ||Q||_F for the raw solution X.
    double relative_residual = 0.0;
};

/// Solves A_cl' X A_cl - X = -Q with Q = lyapunov_rhs + 1e-9 I, then scales
/// X to unit trace. Throws NoCertificateError when rho(A_cl) >= 1.
LyapunovCertificate solve_certificate(const Matrix& a_cl, const SynthesisConfig& cfg = {});

}  // namespace thetacbc
