#include <doctest.h>

#include "helpers.hpp"
#include "thetacbc/errors.hpp"
#include "thetacbc/linsys.hpp"
#include "thetacbc/rng.hpp"

using namespace thetacbc;
using testutil::mat;
using testutil::vec;

namespace {

const ScalarDistribution kPoint(Degenerate{0.0});

LinearSystem rlc(double sigma_w) { return {testutil::rlc_A(), Matrix::Identity(2, 2), sigma_w, {}}; }

}  // namespace

TEST_CASE("closed loop") {
    const LinearSystem id{Matrix::Identity(2, 2), Matrix::Identity(2, 2), 0.0, {}};
    CHECK(closed_loop(id, FeedbackGain{Matrix::Zero(2, 2)}) == Matrix::Identity(2, 2));

    const Matrix B = mat({{1.0, 2.0}, {0.5, -1.0}, {3.0, 0.0}});
    const Matrix L = mat({{0.1, 0.2, 0.3}, {-0.4, 0.5, 0.6}});
    const LinearSystem zero{Matrix::Zero(3, 3), B, 0.0, {}};
    CHECK((closed_loop(zero, FeedbackGain{L}) - B * L).norm() == 0.0);

    const Matrix a_cl = closed_loop(rlc(0.2), FeedbackGain{testutil::rlc_L()});
    CHECK(a_cl(0, 0) == doctest::Approx(1.0 - 0.1 / 9.0 - 0.0337));
    CHECK(a_cl(1, 1) == doctest::Approx(1.0 - 0.0476));
    CHECK(spectral_radius(a_cl) < 1.0);
    CHECK(spectral_radius(a_cl) == doctest::Approx(0.9552).epsilon(1e-4));

    CHECK_THROWS_AS(closed_loop(id, FeedbackGain{Matrix::Zero(3, 2)}), ShapeError);
}

TEST_CASE("system validation") {
    CHECK_THROWS_AS((LinearSystem{Matrix::Zero(2, 3), Matrix::Zero(2, 1), 0.0, {}}.validate()),
                    ShapeError);
    CHECK_THROWS_AS((LinearSystem{Matrix::Zero(2, 2), Matrix::Zero(3, 1), 0.0, {}}.validate()),
                    ShapeError);
    CHECK_THROWS_AS((LinearSystem{Matrix::Zero(2, 2), Matrix::Zero(2, 1), -0.1, {}}.validate()),
                    ValidationError);
    LinearSystem aniso{Matrix::Zero(2, 2), Matrix::Zero(2, 1), 0.3, vec({0.1, 0.2})};
    CHECK(aniso.noise_std() == vec({0.1, 0.2}));
    CHECK(rlc(0.2).noise_std() == vec({0.2, 0.2}));
}

TEST_CASE("augmented structure") {
    const ScalarDistribution di(HalfNormal{0.1}), du(HalfNormal{1.0});
    const AugmentedSystem aug = build_augmented(rlc(0.2), FeedbackGain{testutil::rlc_L()}, di, du);
    REQUIRE(aug.dim() == 4);
    CHECK(aug.A_bar.rows() == 4);
    CHECK(aug.A_bar.bottomRows(2).isZero(0.0));
    CHECK(aug.A_bar.rightCols(2).isZero(0.0));
    CHECK(aug.D_bar == Matrix::Identity(4, 4));
    const Matrix expected = vec({0.04, 0.04, 0.01, 1.0}).asDiagonal();
    CHECK((aug.Sigma_w_bar() - expected).cwiseAbs().maxCoeff() <= 1e-12);

    const AugmentedSystem quiet = build_augmented(rlc(0.0), FeedbackGain{testutil::rlc_L()},
                                                  kPoint, kPoint);
    CHECK(quiet.Sigma_w_bar().isZero(0.0));
}

TEST_CASE("half-normal second moment against 1e6 draws") {
    RandomStream s(8, 0);
    const ScalarDistribution d(HalfNormal{0.1});
    double m2 = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double x = d.sample(s);
        m2 += x * x;
    }
    m2 /= n;
    const AugmentedSystem aug = build_augmented(rlc(0.2), FeedbackGain{testutil::rlc_L()}, d, d);
    CHECK(std::abs(aug.noise_second_moment(2) - m2) < 4.0 * 0.01 * std::sqrt(2.0 / n));
}

TEST_CASE("step") {
    const AugmentedSystem aug = build_augmented(rlc(0.2), FeedbackGain{testutil::rlc_L()},
                                                ScalarDistribution(HalfNormal{0.1}),
                                                ScalarDistribution(HalfNormal{1.0}));
    CHECK(step(aug, Vector::Zero(4), Vector::Zero(4)).isZero(0.0));

    const Vector z = vec({1.0, -2.0, 0.3, 0.7});
    const Vector next = step(aug, z, Vector::Zero(4));
    CHECK((next.head(2) - aug.A_bar.topLeftCorner(2, 2) * z.head(2)).norm() == 0.0);
    CHECK(next.tail(2).isZero(0.0));

    RandomStream s(4, 4);
    for (int i = 0; i < 50; ++i) {
        Vector z1(4), z2(4), w1(4), w2(4);
        for (int k = 0; k < 4; ++k) {
            z1(k) = s.normal();
            z2(k) = s.normal();
            w1(k) = s.normal();
            w2(k) = s.normal();
        }
        Vector dense(4);
        for (int r = 0; r < 4; ++r) {
            dense(r) = w1(r);
            for (int c = 0; c < 4; ++c) dense(r) += aug.A_bar(r, c) * z1(c);
        }
        CHECK((step(aug, z1, w1) - dense).norm() <= 1e-14);
        CHECK((step(aug, z1 + z2, w1 + w2) - step(aug, z1, w1) - step(aug, z2, w2)).norm() <= 1e-13);
    }
    CHECK_THROWS_AS(step(aug, Vector::Zero(3), Vector::Zero(4)), ShapeError);
}
