#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "thetacbc/certificate_matrix.hpp"
#include "thetacbc/geometry.hpp"
#include "thetacbc/linsys.hpp"
#include "thetacbc/synthesis.hpp"

namespace thetacbc {

struct StateBounds {
    Vector lower;
    Vector upper;
};

/// P_theta = diag(p11, scale * s^((1/s - 1) / s^1.9)) with s the init-set
/// perturbation sigma. Values below `floor` (including underflow to 0) are
/// raised to `floor`; s = 0 falls back to p11.
struct SigmaPowerPTheta {
    double p11 = 1e-6;
    double scale = 1.57e-4;
    double floor = 1e-8;

    Matrix evaluate(double sigma_i) const;
};

using PThetaSpec = std::variant<Matrix, SigmaPowerPTheta>;

/// User-supplied certificate pieces; whatever is missing gets synthesized
/// (P_x) or defaulted (P_theta = 1e-6 I).
struct CertificateSpec {
    std::optional<Matrix> P_x;
    std::optional<PThetaSpec> P_theta;
};

struct SweepGrid {
    std::vector<double> sigma_w;
    std::vector<double> sigma_i;
    std::vector<double> sigma_u;
};

/// Complete verification problem: stochastic linear system, optional
/// controller/certificate, random initial and unsafe sets, and horizon T.
struct Scenario {
    LinearSystem system;
    std::optional<FeedbackGain> gain;
    std::optional<CertificateSpec> certificate;
    UncertainSet init_set;
    UncertainSet unsafe_set;
    int horizon = 1;
    std::optional<StateBounds> state_bounds;
    std::string label;
    SynthesisConfig synthesis;
    std::optional<SweepGrid> sweep;

    void validate() const;

    /// Copy with sigma_w and both perturbations replaced. A sigma of 0 maps
    /// to Degenerate(0), anything positive to HalfNormal(sigma).
    Scenario with_noise(double sigma_w, double sigma_i, double sigma_u) const;
};

/// Scenario with every optional piece filled in.
struct ResolvedScenario {
    Scenario scenario;
    FeedbackGain gain;
    CertificateMatrix certificate;
    Matrix a_cl;
    bool gain_synthesized = false;
    bool certificate_synthesized = false;
};

/// Validates, synthesizes a gain and/or P_x when absent, and evaluates the
/// P_theta rule. Throws UnstabilizableError / NoCertificateError from
/// synthesis.
ResolvedScenario resolve(const Scenario& scenario);

}  // namespace thetacbc
