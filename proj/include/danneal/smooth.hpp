#pragma once

namespace danneal {

// Degree-7 smoothstep on [0,1]: h(0)=0, h(1)=1, and derivatives of orders
// 1-3 vanish at both ends, so blending two smooth branches with weights
// (1-h, h) is C^3 at the seams.
//
//   h(s)    = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7
//   h'(s)   = 140 (s(1-s))^3
//   h''(s)  = 420 (s(1-s))^2 (1-2s)
//   h'''(s) = 840 s (1 - 6s + 10 s^2 - 5 s^3)
inline double smoothstep(double s) {
    const double s2 = s * s;
    return s2 * s2 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)));
}

// Derivative of the given order (0..3); callers keep s inside [0,1].
inline double smoothstep_deriv(double s, int order) {
    switch (order) {
        case 0:
            return smoothstep(s);
        case 1: {
            const double u = s * (1.0 - s);
            return 140.0 * u * u * u;
        }
        case 2: {
            const double u = s * (1.0 - s);
            return 420.0 * u * u * (1.0 - 2.0 * s);
        }
        case 3:
            return 840.0 * s * (1.0 + s * (-6.0 + s * (10.0 - 5.0 * s)));
        default:
            return 0.0;
    }
}

}  // namespace danneal
