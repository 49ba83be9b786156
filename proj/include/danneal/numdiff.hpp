#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>

namespace danneal {

// Scale-aware step for central differences; the default pairs with the
// 1e-6 relative tolerance used by the gradient-consistency checks.
inline double fd_step(const Eigen::VectorXd& x, double scale = 1e-5) {
    return scale * (1.0 + x.norm());
}

// Gap relative to a hybrid denominator: absolute near zero, relative away
// from it. Keeps gradient checks meaningful at stationary points.
inline double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double rel_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).norm() / std::max({1.0, a.norm(), b.norm()});
}

template <class F>
Eigen::VectorXd central_gradient(F&& f, const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd e = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x(i);
        e(i) = xi + h;
        const double fp = f(e);
        e(i) = xi - h;
        const double fm = f(e);
        e(i) = xi;
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Symmetrized central-difference Jacobian of an analytic gradient — the
// numerical Hessian used by the minimum certificates.
template <class G>
Eigen::MatrixXd hessian_from_gradient(G&& grad, const Eigen::VectorXd& x, double h) {
    const Eigen::Index d = x.size();
    Eigen::MatrixXd jac(d, d);
    Eigen::VectorXd e = x;
    for (Eigen::Index j = 0; j < d; ++j) {
        const double xj = x(j);
        e(j) = xj + h;
        const Eigen::VectorXd gp = grad(e);
        e(j) = xj - h;
        const Eigen::VectorXd gm = grad(e);
        e(j) = xj;
        jac.col(j) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (jac + jac.transpose());
}

// Trace of the same Jacobian: the Laplacian via central differences of the
// analytic gradient.
template <class G>
double divergence_from_gradient(G&& grad, const Eigen::VectorXd& x, double h) {
    double acc = 0.0;
    Eigen::VectorXd e = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x(i);
        e(i) = xi + h;
        acc += grad(e)(i);
        e(i) = xi - h;
        acc -= grad(e)(i);
        e(i) = xi;
    }
    return acc / (2.0 * h);
}

// --- One-sided seam probes -------------------------------------------------
//
// These evaluate a function strictly on one side of a point y0 (side = +1
// right, -1 left; the point itself is never touched, since at a seam it is
// ambiguous which branch owns it) and extrapolate the value or a derivative
// back to y0. Polynomial-fit stencils keep the truncation error O(h^3):
//
//   value at y0        : quadratic through offsets  h..3h
//   1st derivative     : cubic through offsets      h..4h
//   2nd derivative     : quartic through offsets    h..5h

template <class F>
double onesided_value(F&& f, double y0, double h, int side) {
    const double s = side >= 0 ? h : -h;
    return 3.0 * f(y0 + s) - 3.0 * f(y0 + 2.0 * s) + f(y0 + 3.0 * s);
}

template <class F>
double onesided_deriv1(F&& f, double y0, double h, int side) {
    const double s = side >= 0 ? h : -h;
    const double num =
        -26.0 * f(y0 + s) + 57.0 * f(y0 + 2.0 * s) - 42.0 * f(y0 + 3.0 * s) + 11.0 * f(y0 + 4.0 * s);
    return num / (6.0 * s);
}

template <class F>
double onesided_deriv2(F&& f, double y0, double h, int side) {
    const double s = side >= 0 ? h : -h;
    const double num = 71.0 * f(y0 + s) - 236.0 * f(y0 + 2.0 * s) + 294.0 * f(y0 + 3.0 * s) -
                       164.0 * f(y0 + 4.0 * s) + 35.0 * f(y0 + 5.0 * s);
    return num / (12.0 * h * h);
}

// Derivative orders 0..3 of a piecewise function approached from one side of
// a seam. `value` is the function itself; `d1` and `d2` are its analytic
// first/second derivatives where available (d2 may be null). Orders covered
// by an analytic callback are extrapolated directly; the orders above the
// highest callback use the one-sided stencils on it, which is what keeps
// order 3 certifiable at 1e-4 — raw value differences cannot reach that.
struct SeamJet {
    std::array<double, 4> deriv{};  // orders 0..3
};

inline SeamJet onesided_jet(const std::function<double(double)>& value,
                            const std::function<double(double)>& d1,
                            const std::function<double(double)>& d2, double y0, double h,
                            int side) {
    SeamJet jet;
    jet.deriv[0] = onesided_value(value, y0, h, side);
    jet.deriv[1] = onesided_value(d1, y0, h, side);
    if (d2) {
        jet.deriv[2] = onesided_value(d2, y0, h, side);
        jet.deriv[3] = onesided_deriv1(d2, y0, h, side);
    } else {
        jet.deriv[2] = onesided_deriv1(d1, y0, h, side);
        jet.deriv[3] = onesided_deriv2(d1, y0, h, side);
    }
    return jet;
}

}  // namespace danneal
