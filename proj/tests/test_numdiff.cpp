#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "danneal/numdiff.hpp"
#include "danneal/smooth.hpp"

using namespace danneal;

TEST_CASE("relative gap uses the hybrid denominator") {
    CHECK(rel_gap(1.0, 1.0) == 0.0);
    CHECK(rel_gap(100.0, 101.0) == doctest::Approx(1.0 / 101.0));
    // absolute near zero: denominator floors at 1
    CHECK(rel_gap(0.0, 1e-8) == doctest::Approx(1e-8));
    CHECK(rel_gap(Eigen::Vector2d(0, 0), Eigen::Vector2d(1e-9, 0)) == doctest::Approx(1e-9));
}

TEST_CASE("fd step scales with the point") {
    CHECK(fd_step(Eigen::Vector2d(0, 0)) == doctest::Approx(1e-5));
    CHECK(fd_step(Eigen::Vector2d(3, 4)) == doctest::Approx(6e-5));
}

TEST_CASE("central gradient on a quadratic form") {
    Eigen::Matrix2d a;
    a << 3.0, 1.0, 1.0, 2.0;
    const auto f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x); };
    const Eigen::Vector2d x(0.7, -1.3);
    const Eigen::VectorXd g = central_gradient(f, x, 1e-5);
    CHECK(rel_gap(g, Eigen::VectorXd(a * x)) < 1e-9);
}

TEST_CASE("hessian from an analytic gradient") {
    Eigen::Matrix2d a;
    a << 4.0, -1.0, -1.0, 5.0;
    const auto grad = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };
    const Eigen::MatrixXd h = hessian_from_gradient(grad, Eigen::Vector2d(1.0, 2.0), 1e-5);
    CHECK((h - a).norm() < 1e-7);
    CHECK(h == h.transpose().eval());  // symmetrized by construction
}

TEST_CASE("divergence from an analytic gradient") {
    // grad = x in d dimensions: divergence = d
    const auto grad = [](const Eigen::VectorXd& x) { return x; };
    CHECK(divergence_from_gradient(grad, Eigen::Vector3d(1, 2, 3), 1e-5) ==
          doctest::Approx(3.0).epsilon(1e-9));
    // grad of |x|^4: divergence = (4d + 8)|x|^2
    const auto quartic = [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(4.0 * x.squaredNorm() * x);
    };
    const Eigen::Vector2d p(0.6, -0.8);  // |p| = 1
    CHECK(divergence_from_gradient(quartic, p, 1e-6) == doctest::Approx(16.0).epsilon(1e-6));
}

TEST_CASE("one-sided extrapolation is exact on low-degree polynomials") {
    const double y0 = 0.4, h = 1e-2;
    const auto quadratic = [](double y) { return 2.0 + 3.0 * y - 5.0 * y * y; };
    // (3, -3, 1) fits a quadratic exactly
    CHECK(onesided_value(quadratic, y0, h, +1) == doctest::Approx(quadratic(y0)).epsilon(1e-12));
    CHECK(onesided_value(quadratic, y0, h, -1) == doctest::Approx(quadratic(y0)).epsilon(1e-12));

    const auto cubic = [](double y) { return y * y * y - 2.0 * y; };
    // 4-point first derivative is exact on cubics
    CHECK(onesided_deriv1(cubic, y0, h, +1) ==
          doctest::Approx(3.0 * y0 * y0 - 2.0).epsilon(1e-10));
    CHECK(onesided_deriv1(cubic, y0, h, -1) ==
          doctest::Approx(3.0 * y0 * y0 - 2.0).epsilon(1e-10));
    // 5-point second derivative likewise
    CHECK(onesided_deriv2(cubic, y0, h, +1) == doctest::Approx(6.0 * y0).epsilon(1e-8));
    CHECK(onesided_deriv2(cubic, y0, h, -1) == doctest::Approx(6.0 * y0).epsilon(1e-8));
}

TEST_CASE("one-sided probes never touch the expansion point or the far side") {
    double leftmost = 1e9, rightmost = -1e9;
    const auto probe = [&](double y) {
        leftmost = std::min(leftmost, y);
        rightmost = std::max(rightmost, y);
        return y * y;
    };
    onesided_value(probe, 1.0, 1e-3, +1);
    onesided_deriv1(probe, 1.0, 1e-3, +1);
    onesided_deriv2(probe, 1.0, 1e-3, +1);
    CHECK(leftmost > 1.0);
    CHECK(rightmost <= 1.0 + 5.0 * 1e-3 + 1e-12);

    leftmost = 1e9;
    rightmost = -1e9;
    onesided_deriv2(probe, 1.0, 1e-3, -1);
    CHECK(rightmost < 1.0);
    CHECK(leftmost >= 1.0 - 5.0 * 1e-3 - 1e-12);
}

TEST_CASE("seam jets recover the smoothstep's one-sided derivatives") {
    // at s = 1 from the left: h = 1, h' = h'' = h''' = 0 — the property the
    // whole blending construction rests on
    const auto value = [](double s) { return smoothstep(s); };
    const auto d1 = [](double s) { return smoothstep_deriv(s, 1); };
    const auto d2 = [](double s) { return smoothstep_deriv(s, 2); };

    const SeamJet with_d2 = onesided_jet(value, d1, d2, 1.0, 1e-4, -1);
    CHECK(with_d2.deriv[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(with_d2.deriv[1]) < 1e-9);
    CHECK(std::abs(with_d2.deriv[2]) < 1e-7);
    CHECK(std::abs(with_d2.deriv[3]) < 1e-4);

    // without an analytic second derivative the stencils fall back onto d1
    const SeamJet from_d1 = onesided_jet(value, d1, nullptr, 1.0, 1e-4, -1);
    CHECK(from_d1.deriv[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(from_d1.deriv[2]) < 1e-6);
    CHECK(std::abs(from_d1.deriv[3]) < 1e-2);

    // interior point, all orders against the closed forms
    const SeamJet mid = onesided_jet(value, d1, d2, 0.5, 1e-4, +1);
    CHECK(mid.deriv[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(mid.deriv[1] == doctest::Approx(140.0 * std::pow(0.25, 3)).epsilon(1e-10));
    CHECK(mid.deriv[2] == doctest::Approx(0.0).epsilon(1e-8));  // h'' odd around 1/2
    CHECK(mid.deriv[3] == doctest::Approx(840.0 * 0.5 * (1.0 - 3.0 + 2.5 - 0.625)).epsilon(1e-6));
}
