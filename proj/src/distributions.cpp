#include "thetacbc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thetacbc/errors.hpp"

namespace thetacbc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive_sigma(double sigma, const char* family) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ValidationError(std::string(family) + ": sigma must be a positive finite number");
    }
}

}  // namespace

ScalarDistribution::ScalarDistribution(HalfNormal d) : law_(d) {
    require_positive_sigma(d.sigma, "half_normal");
}

ScalarDistribution::ScalarDistribution(Normal d) : law_(d) {
    require_positive_sigma(d.sigma, "normal");
    if (!std::isfinite(d.mu)) {
        throw ValidationError("normal: mu must be finite");
    }
}

ScalarDistribution::ScalarDistribution(Degenerate d) : law_(d) {
    if (!std::isfinite(d.value)) {
        throw ValidationError("degenerate: value must be finite");
    }
}

ScalarDistribution::ScalarDistribution(Tabulated d) {
    const auto& g = d.grid;
    const auto& f = d.density;
    if (g.size() < 2 || g.size() != f.size()) {
        throw ValidationError("tabulated: grid and density need equal length >= 2");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i]) || !std::isfinite(f[i]) || f[i] < 0.0) {
            throw ValidationError("tabulated: grid must be finite and density nonnegative");
        }
        if (i > 0 && !(g[i] > g[i - 1])) {
            throw ValidationError("tabulated: grid must be strictly increasing");
        }
    }
    cumulative_.assign(g.size(), 0.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
        cumulative_[i] = cumulative_[i - 1] + 0.5 * (f[i] + f[i - 1]) * (g[i] - g[i - 1]);
    }
    if (std::abs(cumulative_.back() - 1.0) > 1e-8) {
        std::ostringstream msg;
        msg << "tabulated: density integrates to " << cumulative_.back() << ", expected 1";
        throw ValidationError(msg.str());
    }
    law_ = std::move(d);
}

double ScalarDistribution::mean() const {
    return std::visit(
        Overloaded{
            [](const HalfNormal& d) { return d.sigma * std::sqrt(2.0 / std::numbers::pi); },
            [](const Normal& d) { return d.mu; },
            [](const Degenerate& d) { return d.value; },
            [this](const Tabulated& d) {
                double acc = 0.0;
                for (std::size_t i = 1; i < d.grid.size(); ++i) {
                    acc += 0.5 * (d.grid[i] * d.density[i] + d.grid[i - 1] * d.density[i - 1]) *
                           (d.grid[i] - d.grid[i - 1]);
                }
                return acc / cumulative_.back();
            },
        },
        law_);
}

double ScalarDistribution::second_moment() const {
    return std::visit(
        Overloaded{
            [](const HalfNormal& d) { return d.sigma * d.sigma; },
            [](const Normal& d) { return d.mu * d.mu + d.sigma * d.sigma; },
            [](const Degenerate& d) { return d.value * d.value; },
            [this](const Tabulated& d) {
                double acc = 0.0;
                for (std::size_t i = 1; i < d.grid.size(); ++i) {
                    const double a = d.grid[i - 1];
                    const double b = d.grid[i];
                    acc += 0.5 * (b * b * d.density[i] + a * a * d.density[i - 1]) * (b - a);
                }
                return acc / cumulative_.back();
            },
        },
        law_);
}

double ScalarDistribution::stddev() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, second_moment() - m * m));
}

double ScalarDistribution::cdf(double x) const {
    if (std::isnan(x)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::visit(
        Overloaded{
            [x](const HalfNormal& d) {
                return x <= 0.0 ? 0.0 : std::erf(x * kInvSqrt2 / d.sigma);
            },
            [x](const Normal& d) { return normal_cdf((x - d.mu) / d.sigma); },
            [x](const Degenerate& d) { return x >= d.value ? 1.0 : 0.0; },
            [x, this](const Tabulated& d) {
                const auto& g = d.grid;
                if (x <= g.front()) {
                    return 0.0;
                }
                if (x >= g.back()) {
                    return 1.0;
                }
                const auto it = std::upper_bound(g.begin(), g.end(), x);
                const std::size_t j = static_cast<std::size_t>(it - g.begin()) - 1;
                const double t = x - g[j];
                const double slope = (d.density[j + 1] - d.density[j]) / (g[j + 1] - g[j]);
                const double fx = d.density[j] + slope * t;
                const double mass = cumulative_[j] + 0.5 * (d.density[j] + fx) * t;
                return std::clamp(mass / cumulative_.back(), 0.0, 1.0);
            },
        },
        law_);
}

double ScalarDistribution::pdf(double x) const {
    return std::visit(
        Overloaded{
            [x](const HalfNormal& d) {
                return x < 0.0 ? 0.0 : 2.0 * normal_pdf(x / d.sigma) / d.sigma;
            },
            [x](const Normal& d) { return normal_pdf((x - d.mu) / d.sigma) / d.sigma; },
            [x](const Degenerate& d) {
                return x == d.value ? std::numeric_limits<double>::infinity() : 0.0;
            },
            [x, this](const Tabulated& d) {
                const auto& g = d.grid;
                if (x < g.front() || x > g.back()) {
                    return 0.0;
                }
                if (x == g.back()) {
                    return d.density.back() / cumulative_.back();
                }
                const auto it = std::upper_bound(g.begin(), g.end(), x);
                const std::size_t j = static_cast<std::size_t>(it - g.begin()) - 1;
                const double w = (x - g[j]) / (g[j + 1] - g[j]);
                return ((1.0 - w) * d.density[j] + w * d.density[j + 1]) / cumulative_.back();
            },
        },
        law_);
}

double ScalarDistribution::sample(RandomStream& stream) const {
    return std::visit(
        Overloaded{
            [&stream](const HalfNormal& d) { return std::abs(d.sigma * stream.normal()); },
            [&stream](const Normal& d) { return d.mu + d.sigma * stream.normal(); },
            [](const Degenerate& d) { return d.value; },
            [&stream, this](const Tabulated& d) {
                const auto& g = d.grid;
                const double target = stream.uniform() * cumulative_.back();
                auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
                if (it == cumulative_.end()) {
                    return g.back();
                }
                const std::size_t j = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
                const double h = g[j + 1] - g[j];
                const double f0 = d.density[j];
                const double slope = (d.density[j + 1] - f0) / h;
                const double delta = target - cumulative_[j];
                // Root of f0 t + slope t^2 / 2 = delta, in cancellation-free form.
                const double denom = f0 + std::sqrt(std::max(0.0, f0 * f0 + 2.0 * slope * delta));
                const double t = denom > 0.0 ? 2.0 * delta / denom : 0.5 * h;
                return g[j] + std::clamp(t, 0.0, h);
            },
        },
        law_);
}

std::pair<double, double> ScalarDistribution::effective_support(double tail_sigmas) const {
    return std::visit(
        Overloaded{
            [tail_sigmas, this](const HalfNormal& d) {
                return std::pair{0.0, mean() + tail_sigmas * d.sigma};
            },
            [tail_sigmas](const Normal& d) {
                return std::pair{d.mu - tail_sigmas * d.sigma, d.mu + tail_sigmas * d.sigma};
            },
            [](const Degenerate& d) { return std::pair{d.value, d.value}; },
            [](const Tabulated& d) { return std::pair{d.grid.front(), d.grid.back()}; },
        },
        law_);
}

double ScalarDistribution::scale_parameter() const {
    return std::visit(Overloaded{
                          [](const HalfNormal& d) { return d.sigma; },
                          [](const Normal& d) { return d.sigma; },
                          [](const Degenerate&) { return 0.0; },
                          [this](const Tabulated&) { return stddev(); },
                      },
                      law_);
}

std::string ScalarDistribution::describe() const {
    std::ostringstream out;
    std::visit(Overloaded{
                   [&out](const HalfNormal& d) { out << "half_normal(sigma=" << d.sigma << ")"; },
                   [&out](const Normal& d) {
                       out << "normal(mu=" << d.mu << ", sigma=" << d.sigma << ")";
                   },
                   [&out](const Degenerate& d) { out << "degenerate(" << d.value << ")"; },
                   [&out](const Tabulated& d) {
                       out << "tabulated(" << d.grid.size() << " points)";
                   },
               },
               law_);
    return out.str();
}

bool operator==(const ScalarDistribution& a, const ScalarDistribution& b) {
    if (a.law_.index() != b.law_.index()) {
        return false;
    }
    return std::visit(
        Overloaded{
            [&b](const HalfNormal& d) { return d.sigma == std::get<HalfNormal>(b.law_).sigma; },
            [&b](const Normal& d) {
                const auto& o = std::get<Normal>(b.law_);
                return d.mu == o.mu && d.sigma == o.sigma;
            },
            [&b](const Degenerate& d) { return d.value == std::get<Degenerate>(b.law_).value; },
            [&b](const Tabulated& d) {
                const auto& o = std::get<Tabulated>(b.law_);
                return d.grid == o.grid && d.density == o.density;
            },
        },
        a.law_);
}

namespace {

// Trapezoid estimate of the integral of F1(x - t) f2(t) dt, normalized by the
// trapezoid mass of f2 on the same grid.
double convolve(const ScalarDistribution& d1, const ScalarDistribution& d2, double x,
                int grid_points) {
    const auto [lo, hi] = d2.effective_support();
    const int n = std::max(grid_points, 2);
    const double h = (hi - lo) / (n - 1);
    double acc = 0.0;
    double mass = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = (k == n - 1) ? hi : lo + k * h;
        const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        const double f = d2.pdf(t);
        acc += w * d1.cdf(x - t) * f;
        mass += w * f;
    }
    return mass > 0.0 ? acc / mass : 0.0;
}

}  // namespace

double sum_cdf(const ScalarDistribution& d1, const ScalarDistribution& d2, double x,
               int grid_points) {
    if (const auto* p = std::get_if<Degenerate>(&d2.variant())) {
        return d1.cdf(x - p->value);
    }
    if (const auto* p = std::get_if<Degenerate>(&d1.variant())) {
        return d2.cdf(x - p->value);
    }
    const auto* n1 = std::get_if<Normal>(&d1.variant());
    const auto* n2 = std::get_if<Normal>(&d2.variant());
    if (n1 && n2) {
        const double mu = n1->mu + n2->mu;
        const double sigma = std::hypot(n1->sigma, n2->sigma);
        return normal_cdf((x - mu) / sigma);
    }
    return sum_cdf_convolution(d1, d2, x, grid_points);
}

double sum_cdf_convolution(const ScalarDistribution& d1, const ScalarDistribution& d2, double x,
                           int grid_points) {
    if (d1.is_degenerate() || d2.is_degenerate()) {
        throw ValidationError("sum_cdf_convolution: point masses have no density");
    }
    const double forward = convolve(d1, d2, x, grid_points);
    const double backward = convolve(d2, d1, x, grid_points);
    return std::clamp(0.5 * (forward + backward), 0.0, 1.0);
}

}  // namespace thetacbc
