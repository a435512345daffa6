#pragma once

#include <initializer_list>
#include <string>

#include "thetacbc/scenario.hpp"

namespace testutil {

using thetacbc::Matrix;
using thetacbc::Vector;

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    Matrix M(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double x : row) M(i, j++) = x;
        ++i;
    }
    return M;
}

inline thetacbc::UncertainSet ball_set(const Vector& c, double s, thetacbc::ScalarDistribution d) {
    return {c, s, thetacbc::ShapeKernel(thetacbc::UnitBall{static_cast<int>(c.size())}),
            std::move(d)};
}

inline thetacbc::ScalarDistribution half_normal_or_point(double sigma) {
    if (sigma == 0.0) return thetacbc::ScalarDistribution(thetacbc::Degenerate{0.0});
    return thetacbc::ScalarDistribution(thetacbc::HalfNormal{sigma});
}

inline Matrix rlc_A() { return mat({{1.0 - 0.05 * 2.0 / 9.0, -0.05 / 9.0}, {0.1, 1.0}}); }
inline Matrix rlc_L() { return mat({{-0.0337, -0.0400}, {-0.0401, -0.0476}}); }
inline Matrix rlc_Px() { return mat({{0.0133, 0.0}, {0.0, 0.0120}}); }

/// 2-D scenario with unit-ball sets, B = I, explicit gain and no P_x.
inline thetacbc::Scenario planar_scenario(const Matrix& A, const Matrix& L, double sigma_w,
                                          const thetacbc::UncertainSet& init,
                                          const thetacbc::UncertainSet& unsafe, int horizon) {
    thetacbc::Scenario sc{thetacbc::LinearSystem{A, Matrix::Identity(2, 2), sigma_w, std::nullopt},
                          thetacbc::FeedbackGain{L},
                          std::nullopt,
                          init,
                          unsafe,
                          horizon,
                          std::nullopt,
                          "test",
                          {},
                          std::nullopt};
    return sc;
}

inline std::string source_path(const std::string& rel) {
    return std::string(THETACBC_SOURCE_DIR) + "/" + rel;
}

}  // namespace testutil
