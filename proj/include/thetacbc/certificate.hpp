#pragma once

#include <string>
#include <vector>

#include "thetacbc/certificate_matrix.hpp"
#include "thetacbc/geometry.hpp"
#include "thetacbc/linsys.hpp"
#include "thetacbc/scenario.hpp"

namespace thetacbc {

/// Default tolerance for the Lyapunov-decrease check A_cl' P_x A_cl - P_x <= tol.
inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr int kDefaultQuadratureNodes = 128;

namespace flags {
inline constexpr const char* kFeasibilityViolated = "feasibility_violated";
inline constexpr const char* kOriginInsideUnsafe = "origin_inside_unsafe";
inline constexpr const char* kBetaBelowEta = "beta_below_eta";
inline constexpr const char* kNonPositiveBeta = "nonpositive_beta";
inline constexpr const char* kVacuousBound = "vacuous_bound";
inline constexpr const char* kInfiniteGauge = "infinite_gauge";
inline constexpr const char* kNoCertificate = "no_certificate";
inline constexpr const char* kAsymmetricKernel = "asymmetric_kernel";
}  // namespace flags

struct OverlapProbability {
    double p_overlap;
    double p_empty;
    /// Gauge distance between centers minus both nominal sizes.
    double separation_margin;
};

/// Probability that the randomly inflated initial and unsafe sets intersect.
/// Requires identical kernels; throws UnsupportedConfiguration otherwise.
OverlapProbability overlap_probability(const UncertainSet& init, const UncertainSet& unsafe);

/// lambda_max(A_cl' P_x A_cl - P_x). Throws ValidationError when P_x is
/// asymmetric beyond 1e-9.
double check_feasibility(const Matrix& a_cl, const CertificateMatrix& P);

struct EtaBeta {
    double eta = 0.0;
    double beta = 0.0;
    /// The smallest unsafe set (nominal size plus the least perturbation)
    /// already contains the origin, so no barrier level separates it.
    bool unsafe_clamped = false;
};

/// Quadrature evaluation of eta = p_empty lambda_max(P_x) E[d_init_max^2] and
/// beta = p_empty lambda_min(P_x) E[d_unsafe_min^2] for any convex kernels
/// and perturbation laws.
EtaBeta eta_beta_general(const UncertainSet& init, const UncertainSet& unsafe,
                         const CertificateMatrix& P, double p_empty,
                         int quadrature_nodes = kDefaultQuadratureNodes);

/// Closed form for unit-ball kernels with half-normal (or zero) perturbations:
///   eta  = p_empty lambda_max [g_i^2 + 2 g_i s_i sqrt(2/pi) + s_i^2],  g_i = |c_i| + r_i
///   beta = p_empty lambda_min [g_u^2 - 2 g_u s_u sqrt(2/pi) + s_u^2],  g_u = |c_u| - r_u
/// unsafe_clamped is set when g_u <= 0.
EtaBeta eta_beta_ball(const UncertainSet& init, const UncertainSet& unsafe,
                      const CertificateMatrix& P, double p_empty);

/// True when eta_beta_ball's preconditions hold.
bool ball_closed_form_applies(const UncertainSet& init, const UncertainSet& unsafe);

/// Expected one-step growth bound c = Tr(D_bar' P D_bar Sigma_w_bar).
double compute_c(const AugmentedSystem& aug, const CertificateMatrix& P);

/// max(0, 1 - (eta + c T) / beta). Throws InvalidCertificate when beta <= 0
/// or beta < eta.
double safety_lower_bound(double eta, double beta, double c, int horizon);

struct CertificateReport {
    std::string label;
    std::string method;
    int horizon = 0;
    double p_empty = 0.0;
    double p_overlap = 0.0;
    double eta = 0.0;
    double beta = 0.0;
    double c = 0.0;
    double safety_lower_bound = 0.0;
    double feasibility_margin = 0.0;
    /// Same moments conditioned on disjoint sets at k = 0 (diagnostic only).
    double eta_conditional = 0.0;
    double beta_conditional = 0.0;
    bool valid = false;
    std::vector<std::string> diagnostics;

    bool has_flag(const std::string& flag) const;
};

struct CertifyOptions {
    double feasibility_tol = kFeasibilityTolerance;
    int quadrature_nodes = kDefaultQuadratureNodes;
    /// Use the quadrature path even when the ball closed form applies.
    bool force_general = false;
};

/// Full pipeline on a resolved scenario: feasibility, p_empty, eta/beta (ball
/// closed form when applicable), c, and the horizon-T safety bound.
CertificateReport certify(const ResolvedScenario& resolved, const CertifyOptions& opts = {});

struct CbcCheck {
    std::string condition;
    bool passed;
    std::string detail;
};

/// Checks the three barrier conditions: the expected-growth condition
/// analytically from the feasibility margin, and the initial/unsafe level
/// conditions by sampling `samples` points of each set.
std::vector<CbcCheck> validate_cbc(const ResolvedScenario& resolved,
                                   const CertificateReport& report, int samples = 10000,
                                   std::uint64_t seed = 7);

}  // namespace thetacbc
