#include "thetacbc/geometry.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "thetacbc/errors.hpp"

namespace thetacbc {

namespace {

constexpr int kSphereStarts = 32;
constexpr double kStepTolerance = 1e-10;
constexpr int kMaxAscentIterations = 4000;

void require_dimension(const ShapeKernel& kernel, const Vector& v, const char* what) {
    if (v.size() != kernel.dimension()) {
        std::ostringstream msg;
        msg << what << ": vector has length " << v.size() << " but kernel dimension is "
            << kernel.dimension();
        throw ShapeError(msg.str());
    }
}

double radical_inverse(int index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * (index % base);
        index /= base;
        f /= base;
    }
    return result;
}

// Deterministic, well-spread starting directions: Halton points in the cube
// pushed onto the sphere, plus the coordinate axes in both orientations.
std::vector<Vector> sphere_starts(int dim) {
    static constexpr std::array<int, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19,
                                                 23, 29, 31, 37, 41, 43, 47, 53};
    std::vector<Vector> starts;
    for (int i = 0; i < dim && static_cast<int>(starts.size()) < kSphereStarts; ++i) {
        starts.push_back(Vector::Unit(dim, i));
        starts.push_back(-Vector::Unit(dim, i));
    }
    for (int k = 1; static_cast<int>(starts.size()) < kSphereStarts && k < 10 * kSphereStarts; ++k) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) {
            const int base = kPrimes[static_cast<std::size_t>(i) % kPrimes.size()];
            v(i) = 2.0 * radical_inverse(k, base) - 1.0;
        }
        const double norm = v.norm();
        if (norm > 1e-3) {
            starts.push_back(v / norm);
        }
    }
    return starts;
}

Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& v) {
    constexpr double h = 1e-6;
    Vector grad(v.size());
    Vector probe = v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        probe(i) = v(i) + h;
        const double up = f(probe);
        probe(i) = v(i) - h;
        const double down = f(probe);
        probe(i) = v(i);
        grad(i) = (up - down) / (2.0 * h);
    }
    return grad;
}

// Maximize a convex, positively homogeneous f over the unit sphere. For such f
// the update v <- grad f(v) / |grad f(v)| never decreases f.
double maximize_convex_on_sphere(const std::function<double(const Vector&)>& f, int dim,
                                 const Vector& hint) {
    std::vector<Vector> starts = sphere_starts(dim);
    if (hint.norm() > 0.0) {
        starts.insert(starts.begin(), hint.normalized());
    }
    double best = -std::numeric_limits<double>::infinity();
    for (Vector v : starts) {
        double value = f(v);
        for (int iter = 0; iter < kMaxAscentIterations; ++iter) {
            const Vector grad = numeric_gradient(f, v);
            const double gnorm = grad.norm();
            if (!(gnorm > 0.0)) {
                break;
            }
            const Vector next = grad / gnorm;
            const double next_value = f(next);
            const double moved = (next - v).norm();
            if (next_value < value) {
                break;
            }
            v = next;
            value = next_value;
            if (moved < kStepTolerance) {
                break;
            }
        }
        best = std::max(best, value);
    }
    return best;
}

Vector project_to_ball(const Vector& v) {
    const double n = v.norm();
    return n > 1.0 ? Vector(v / n) : v;
}

// Maximize a concave f over the closed unit ball by projected gradient ascent
// with an adaptive step.
double maximize_concave_on_ball(const std::function<double(const Vector&)>& f, int dim,
                                const Vector& hint) {
    std::vector<Vector> starts = sphere_starts(dim);
    if (hint.norm() > 0.0) {
        starts.insert(starts.begin(), hint.normalized());
    }
    double best = -std::numeric_limits<double>::infinity();
    for (Vector v : starts) {
        double value = f(v);
        double step = 1.0;
        for (int iter = 0; iter < kMaxAscentIterations && step > 1e-14; ++iter) {
            const Vector grad = numeric_gradient(f, v);
            const Vector cand = project_to_ball(v + step * grad);
            const double cand_value = f(cand);
            if (cand_value > value) {
                const double moved = (cand - v).norm();
                v = cand;
                value = cand_value;
                step *= 2.0;
                if (moved < kStepTolerance) {
                    break;
                }
            } else {
                step *= 0.5;
            }
        }
        best = std::max(best, value);
    }
    return best;
}

void require_nonnegative_size(double size, const char* what) {
    if (size < 0.0) {
        std::ostringstream msg;
        msg << what << ": inflated size s + theta = " << size << " is negative";
        throw DegenerateSetError(msg.str());
    }
}

}  // namespace

ShapeKernel::ShapeKernel(UnitBall ball) : kernel_(ball) {
    if (ball.dimension < 1) {
        throw ValidationError("unit ball dimension must be positive");
    }
}

ShapeKernel::ShapeKernel(SupportOracle oracle) : kernel_(std::move(oracle)) {
    const auto& o = std::get<SupportOracle>(kernel_);
    if (o.dimension < 1 || !o.support || !o.gauge) {
        throw ValidationError("support oracle needs a positive dimension and both callbacks");
    }
}

ShapeKernel ShapeKernel::box(const Vector& half_widths) {
    if (half_widths.size() < 1 || !(half_widths.array() > 0.0).all() || !half_widths.allFinite()) {
        throw ValidationError("box half-widths must be positive and finite");
    }
    std::ostringstream tag;
    tag.precision(17);
    tag << "box[";
    for (Eigen::Index i = 0; i < half_widths.size(); ++i) {
        tag << (i ? "," : "") << half_widths(i);
    }
    tag << "]";
    const Vector h = half_widths;
    SupportOracle oracle{
        static_cast<int>(h.size()),
        [h](const Vector& v) { return h.dot(v.cwiseAbs()); },
        [h](const Vector& y) { return y.cwiseAbs().cwiseQuotient(h).maxCoeff(); },
        tag.str(),
        true,
    };
    ShapeKernel kernel(std::move(oracle));
    kernel.box_half_widths_ = h;
    return kernel;
}

ShapeKernel ShapeKernel::ball_oracle(int dimension) {
    return ShapeKernel(SupportOracle{
        dimension,
        [](const Vector& v) { return v.norm(); },
        [](const Vector& y) { return y.norm(); },
        "ball_oracle",
        true,
    });
}

int ShapeKernel::dimension() const {
    if (const auto* b = std::get_if<UnitBall>(&kernel_)) {
        return b->dimension;
    }
    return std::get<SupportOracle>(kernel_).dimension;
}

bool ShapeKernel::is_symmetric() const {
    if (is_unit_ball()) {
        return true;
    }
    return std::get<SupportOracle>(kernel_).symmetric;
}

const std::string& ShapeKernel::tag() const {
    static const std::string kBall = "ball";
    if (is_unit_ball()) {
        return kBall;
    }
    return std::get<SupportOracle>(kernel_).tag;
}

double ShapeKernel::support_unchecked(const Vector& v) const {
    if (is_unit_ball()) {
        return v.norm();
    }
    return std::get<SupportOracle>(kernel_).support(v);
}

double ShapeKernel::gauge(const Vector& y) const {
    if (is_unit_ball()) {
        return y.norm();
    }
    return std::get<SupportOracle>(kernel_).gauge(y);
}

bool operator==(const ShapeKernel& a, const ShapeKernel& b) {
    if (a.dimension() != b.dimension() || a.is_unit_ball() != b.is_unit_ball()) {
        return false;
    }
    if (a.is_unit_ball()) {
        return true;
    }
    return !a.tag().empty() && a.tag() == b.tag();
}

void UncertainSet::validate() const {
    if (!center.allFinite()) {
        throw ValidationError("set center must be finite");
    }
    if (!(nominal_size >= 0.0) || !std::isfinite(nominal_size)) {
        throw ValidationError("set nominal size must be a nonnegative finite number");
    }
    if (kernel.dimension() != center.size()) {
        std::ostringstream msg;
        msg << "kernel dimension " << kernel.dimension() << " does not match center length "
            << center.size();
        throw ShapeError(msg.str());
    }
}

double support(const ShapeKernel& kernel, const Vector& v) {
    require_dimension(kernel, v, "support");
    if (std::abs(v.norm() - 1.0) > 1e-9) {
        throw ContractViolation("support: direction must have unit Euclidean norm");
    }
    return kernel.support_unchecked(v);
}

double gauge_distance(const ShapeKernel& kernel, const Vector& p, const Vector& q) {
    require_dimension(kernel, p, "gauge_distance");
    require_dimension(kernel, q, "gauge_distance");
    const double g = kernel.gauge(q - p);
    if (std::isnan(g)) {
        return std::numeric_limits<double>::infinity();
    }
    return g;
}

double d_init_max(const UncertainSet& set, double theta) {
    const double r = set.nominal_size + theta;
    require_nonnegative_size(r, "d_init_max");
    if (set.kernel.is_unit_ball()) {
        return set.center.norm() + r;
    }
    const Vector& c = set.center;
    const ShapeKernel& kernel = set.kernel;
    auto objective = [&](const Vector& v) { return v.dot(c) + r * kernel.support_unchecked(v); };
    return maximize_convex_on_sphere(objective, set.dimension(), c);
}

UnsafeDistance d_unsafe_min(const UncertainSet& set, double theta) {
    const double r = set.nominal_size + theta;
    require_nonnegative_size(r, "d_unsafe_min");
    if (set.kernel.gauge(-set.center) <= r) {
        return {0.0, true};
    }
    if (set.kernel.is_unit_ball()) {
        return {std::max(0.0, set.center.norm() - r), false};
    }
    // dist(0, c + rR) = sup_{|v| <= 1} [v'c - r H_R(-v)], a concave program.
    const Vector& c = set.center;
    const ShapeKernel& kernel = set.kernel;
    auto objective = [&](const Vector& v) {
        return v.dot(c) - r * kernel.support_unchecked(-v);
    };
    return {std::max(0.0, maximize_concave_on_ball(objective, set.dimension(), c)), false};
}

bool contains(const UncertainSet& set, double theta, const Vector& x) {
    const double r = set.nominal_size + theta;
    if (r < 0.0) {
        return false;
    }
    return set.kernel.gauge(x - set.center) <= r;
}

Vector sample_uniform(const UncertainSet& set, double theta, RandomStream& stream) {
    const double r = set.nominal_size + theta;
    require_nonnegative_size(r, "sample_uniform");
    const int n = set.dimension();
    if (r == 0.0) {
        return set.center;
    }
    if (set.kernel.is_unit_ball()) {
        Vector dir(n);
        double norm = 0.0;
        do {
            for (int i = 0; i < n; ++i) {
                dir(i) = stream.normal();
            }
            norm = dir.norm();
        } while (norm == 0.0);
        const double radius = r * std::pow(stream.uniform(), 1.0 / n);
        return set.center + (radius / norm) * dir;
    }
    Vector lo(n);
    Vector hi(n);
    for (int i = 0; i < n; ++i) {
        const Vector e = Vector::Unit(n, i);
        hi(i) = set.center(i) + r * set.kernel.support_unchecked(e);
        lo(i) = set.center(i) - r * set.kernel.support_unchecked(-e);
    }
    Vector x(n);
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        for (int i = 0; i < n; ++i) {
            x(i) = lo(i) + (hi(i) - lo(i)) * stream.uniform();
        }
        if (set.kernel.gauge(x - set.center) <= r) {
            return x;
        }
    }
    throw ValidationError("sample_uniform: rejection sampling failed; kernel bounding box is degenerate");
}

}  // namespace thetacbc
