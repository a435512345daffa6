#include "thetacbc/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "thetacbc/errors.hpp"
#include "thetacbc/quadrature.hpp"

namespace thetacbc {

namespace {

struct Spectrum {
    double min;
    double max;
};

Spectrum spectrum(const Matrix& P_x) {
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(P_x, Eigen::EigenvaluesOnly).eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

// E[g(theta) * weight(theta)] restricted to theta >= -size (where the inflated
// set is non-empty), by Gauss-Legendre over the law's effective support.
double expectation(const ScalarDistribution& law, double size, const GaussLegendreRule& rule,
                   const std::function<double(double)>& g) {
    if (const auto* d = std::get_if<Degenerate>(&law.variant())) {
        return size + d->value >= 0.0 ? g(d->value) : 0.0;
    }
    auto [lo, hi] = law.effective_support();
    lo = std::max(lo, -size);
    if (!(hi > lo)) {
        return 0.0;
    }
    return integrate(rule, lo, hi, [&](double theta) { return g(theta) * law.pdf(theta); });
}

double ball_sigma(const ScalarDistribution& law) {
    if (const auto* h = std::get_if<HalfNormal>(&law.variant())) {
        return h->sigma;
    }
    return 0.0;
}

bool zero_or_half_normal(const ScalarDistribution& law) {
    if (law.is_half_normal()) {
        return true;
    }
    const auto* d = std::get_if<Degenerate>(&law.variant());
    return d != nullptr && d->value == 0.0;
}

}  // namespace

bool CertificateReport::has_flag(const std::string& flag) const {
    return std::find(diagnostics.begin(), diagnostics.end(), flag) != diagnostics.end();
}

OverlapProbability overlap_probability(const UncertainSet& init, const UncertainSet& unsafe) {
    if (!(init.kernel == unsafe.kernel)) {
        throw UnsupportedConfiguration(
            "overlap_probability requires identical shape kernels for the initial and unsafe sets");
    }
    const double d_r = gauge_distance(init.kernel, init.center, unsafe.center);
    const double margin = d_r - (unsafe.nominal_size + init.nominal_size);
    if (std::isinf(margin)) {
        return {0.0, 1.0, margin};
    }
    const auto* di = std::get_if<Degenerate>(&init.perturbation.variant());
    const auto* du = std::get_if<Degenerate>(&unsafe.perturbation.variant());
    if (di && du) {
        // Touching sets count as overlapping.
        const double p = (di->value + du->value >= margin) ? 1.0 : 0.0;
        return {p, 1.0 - p, margin};
    }
    const double p_empty = sum_cdf(init.perturbation, unsafe.perturbation, margin);
    return {1.0 - p_empty, p_empty, margin};
}

double check_feasibility(const Matrix& a_cl, const CertificateMatrix& P) {
    const Matrix& P_x = P.P_x;
    if (P_x.rows() != P_x.cols() || a_cl.rows() != a_cl.cols() || a_cl.rows() != P_x.rows()) {
        throw ShapeError("check_feasibility: A_cl and P_x must be square of equal size");
    }
    if ((P_x - P_x.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw ValidationError("check_feasibility: P_x is not symmetric");
    }
    Matrix M = a_cl.transpose() * P_x * a_cl - P_x;
    M = (0.5 * (M + M.transpose())).eval();
    return Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

EtaBeta eta_beta_general(const UncertainSet& init, const UncertainSet& unsafe,
                         const CertificateMatrix& P, double p_empty, int quadrature_nodes) {
    const Spectrum sp = spectrum(P.P_x);
    const GaussLegendreRule rule = gauss_legendre(quadrature_nodes);

    const double init_moment = expectation(init.perturbation, init.nominal_size, rule, [&](double t) {
        const double d = d_init_max(init, t);
        return d * d;
    });

    const double unsafe_moment =
        expectation(unsafe.perturbation, unsafe.nominal_size, rule, [&](double t) {
            const double d = d_unsafe_min(unsafe, t).value;
            return d * d;
        });

    // Same rule as the closed form: flag when even the smallest unsafe set
    // contains the origin. Partial clamping is already priced in above.
    double theta_min = 0.0;
    if (const auto* d = std::get_if<Degenerate>(&unsafe.perturbation.variant())) {
        theta_min = d->value;
    } else {
        theta_min = std::max(unsafe.perturbation.effective_support().first, -unsafe.nominal_size);
    }
    const bool clamped = unsafe.nominal_size + theta_min >= 0.0 &&
                         d_unsafe_min(unsafe, theta_min).origin_inside;

    return {p_empty * sp.max * init_moment, p_empty * sp.min * unsafe_moment, clamped};
}

bool ball_closed_form_applies(const UncertainSet& init, const UncertainSet& unsafe) {
    return init.kernel.is_unit_ball() && unsafe.kernel.is_unit_ball() &&
           zero_or_half_normal(init.perturbation) && zero_or_half_normal(unsafe.perturbation);
}

EtaBeta eta_beta_ball(const UncertainSet& init, const UncertainSet& unsafe,
                      const CertificateMatrix& P, double p_empty) {
    if (!ball_closed_form_applies(init, unsafe)) {
        throw UnsupportedConfiguration(
            "eta_beta_ball needs unit-ball kernels and half-normal perturbations");
    }
    const Spectrum sp = spectrum(P.P_x);
    const double k = std::sqrt(2.0 / std::numbers::pi);
    const double gamma_i = init.center.norm() + init.nominal_size;
    const double gamma_u = unsafe.center.norm() - unsafe.nominal_size;
    const double s_i = ball_sigma(init.perturbation);
    const double s_u = ball_sigma(unsafe.perturbation);
    EtaBeta out;
    out.eta = p_empty * sp.max * (gamma_i * gamma_i + 2.0 * gamma_i * s_i * k + s_i * s_i);
    out.beta = p_empty * sp.min * (gamma_u * gamma_u - 2.0 * gamma_u * s_u * k + s_u * s_u);
    out.unsafe_clamped = !(gamma_u > 0.0);
    return out;
}

double compute_c(const AugmentedSystem& aug, const CertificateMatrix& P) {
    const Matrix full = P.full();
    if (full.rows() != aug.D_bar.rows() || aug.noise_second_moment.size() != aug.D_bar.cols()) {
        throw ShapeError("compute_c: certificate and augmented system dimensions differ");
    }
    return (aug.D_bar.transpose() * full * aug.D_bar * aug.Sigma_w_bar()).trace();
}

double safety_lower_bound(double eta, double beta, double c, int horizon) {
    if (!(beta > 0.0)) {
        throw InvalidCertificate("safety_lower_bound: beta must be positive");
    }
    if (beta < eta) {
        throw InvalidCertificate("safety_lower_bound: beta < eta, barrier levels do not separate");
    }
    if (horizon < 1) {
        throw ValidationError("safety_lower_bound: horizon must be positive");
    }
    return std::max(0.0, 1.0 - (eta + c * horizon) / beta);
}

CertificateReport certify(const ResolvedScenario& resolved, const CertifyOptions& opts) {
    const Scenario& sc = resolved.scenario;
    const UncertainSet& init = sc.init_set;
    const UncertainSet& unsafe = sc.unsafe_set;
    const CertificateMatrix& P = resolved.certificate;

    CertificateReport report;
    report.label = sc.label;
    report.horizon = sc.horizon;
    report.feasibility_margin = check_feasibility(resolved.a_cl, P);
    if (report.feasibility_margin > opts.feasibility_tol) {
        report.diagnostics.emplace_back(flags::kFeasibilityViolated);
    }

    const OverlapProbability overlap = overlap_probability(init, unsafe);
    report.p_overlap = overlap.p_overlap;
    report.p_empty = overlap.p_empty;
    if (std::isinf(overlap.separation_margin)) {
        report.diagnostics.emplace_back(flags::kInfiniteGauge);
    }
    if (!init.kernel.is_symmetric() || !unsafe.kernel.is_symmetric()) {
        report.diagnostics.emplace_back(flags::kAsymmetricKernel);
    }

    EtaBeta eb;
    if (!opts.force_general && ball_closed_form_applies(init, unsafe)) {
        report.method = "ball_closed_form";
        eb = eta_beta_ball(init, unsafe, P, report.p_empty);
    } else {
        report.method = "general_quadrature";
        eb = eta_beta_general(init, unsafe, P, report.p_empty, opts.quadrature_nodes);
    }
    report.eta = eb.eta;
    report.beta = eb.beta;
    if (eb.unsafe_clamped) {
        report.diagnostics.emplace_back(flags::kOriginInsideUnsafe);
    }

    const AugmentedSystem aug =
        build_augmented(sc.system, resolved.gain, init.perturbation, unsafe.perturbation);
    report.c = compute_c(aug, P);

    // Moments conditioned on the sets being disjoint at k = 0, times p_empty.
    if (!std::isinf(overlap.separation_margin)) {
        const Spectrum sp = spectrum(P.P_x);
        const GaussLegendreRule rule = gauss_legendre(opts.quadrature_nodes);
        const double dbar = overlap.separation_margin;
        report.eta_conditional =
            sp.max * expectation(init.perturbation, init.nominal_size, rule, [&](double t) {
                const double d = d_init_max(init, t);
                return d * d * unsafe.perturbation.cdf(dbar - t);
            });
        report.beta_conditional =
            sp.min * expectation(unsafe.perturbation, unsafe.nominal_size, rule, [&](double t) {
                const double d = d_unsafe_min(unsafe, t).value;
                return d * d * init.perturbation.cdf(dbar - t);
            });
    }

    if (!(report.beta > 0.0)) {
        report.diagnostics.emplace_back(flags::kNonPositiveBeta);
    } else if (report.beta < report.eta) {
        report.diagnostics.emplace_back(flags::kBetaBelowEta);
    }
    report.valid = report.feasibility_margin <= opts.feasibility_tol && !eb.unsafe_clamped &&
                   report.beta > 0.0 && report.beta >= report.eta &&
                   !std::isinf(overlap.separation_margin);
    if (report.valid) {
        report.safety_lower_bound = safety_lower_bound(report.eta, report.beta, report.c, sc.horizon);
        if (report.safety_lower_bound == 0.0) {
            report.diagnostics.emplace_back(flags::kVacuousBound);
        }
    }
    return report;
}

std::vector<CbcCheck> validate_cbc(const ResolvedScenario& resolved,
                                   const CertificateReport& report, int samples,
                                   std::uint64_t seed) {
    const Scenario& sc = resolved.scenario;
    const Matrix& P_x = resolved.certificate.P_x;
    const Spectrum sp = spectrum(P_x);
    std::vector<CbcCheck> checks;

    {
        std::ostringstream detail;
        detail << "feasibility margin " << report.feasibility_margin << ", c = " << report.c;
        checks.push_back({"expected_growth", report.feasibility_margin <= kFeasibilityTolerance,
                          detail.str()});
    }

    auto mean_and_se = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= std::max<double>(1.0, static_cast<double>(v.size()) - 1.0);
        return std::pair{mean, std::sqrt(var / static_cast<double>(v.size()))};
    };

    {
        RandomStream stream(seed, 0);
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(samples));
        bool pointwise = true;
        for (int k = 0; k < samples; ++k) {
            const double theta = sc.init_set.perturbation.sample(stream);
            if (sc.init_set.nominal_size + theta < 0.0) {
                continue;
            }
            const Vector x = sample_uniform(sc.init_set, theta, stream);
            const double b = x.dot(P_x * x);
            const double d = d_init_max(sc.init_set, theta);
            pointwise = pointwise && b <= sp.max * d * d * (1.0 + 1e-9) + 1e-15;
            values.push_back(report.p_empty * b);
        }
        const auto [mean, se] = mean_and_se(values);
        std::ostringstream detail;
        detail << "sampled E[B] = " << mean << " (se " << se << ") vs eta = " << report.eta;
        checks.push_back({"initial_level", pointwise && mean <= report.eta + 3.0 * se + 1e-15,
                          detail.str()});
    }

    {
        if (report.has_flag(flags::kOriginInsideUnsafe)) {
            checks.push_back({"unsafe_level", false,
                              "origin lies inside the unsafe set for some perturbation; beta is unsound"});
        } else {
            RandomStream stream(seed, 1);
            std::vector<double> values;
            values.reserve(static_cast<std::size_t>(samples));
            bool pointwise = true;
            for (int k = 0; k < samples; ++k) {
                const double theta = sc.unsafe_set.perturbation.sample(stream);
                if (sc.unsafe_set.nominal_size + theta < 0.0) {
                    continue;
                }
                const UnsafeDistance d = d_unsafe_min(sc.unsafe_set, theta);
                if (d.origin_inside) {
                    pointwise = false;
                    continue;
                }
                const Vector x = sample_uniform(sc.unsafe_set, theta, stream);
                const double b = x.dot(P_x * x);
                pointwise = pointwise && b >= sp.min * d.value * d.value * (1.0 - 1e-9) - 1e-15;
                values.push_back(report.p_empty * b);
            }
            const auto [mean, se] = mean_and_se(values);
            std::ostringstream detail;
            detail << "sampled E[B] = " << mean << " (se " << se << ") vs beta = " << report.beta;
            checks.push_back({"unsafe_level", pointwise && mean >= report.beta - 3.0 * se,
                              detail.str()});
        }
    }
    return checks;
}

}  // namespace thetacbc
