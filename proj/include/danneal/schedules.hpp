#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace danneal {

struct StepWeights {
    double alpha = 0.0;  // innovation (gradient) weight
    double beta = 0.0;   // consensus weight
    double gamma = 0.0;  // annealing-noise weight
};

// max(ln ln t, 1). The double log is undefined at t=1 and stays below 1 up
// to t=15, so the floor keeps the annealing denominator real and positive on
// the whole range while leaving the tail untouched.
double loglog_floor(std::int64_t t);

// The decaying weight family
//
//   alpha_t = c_alpha / t
//   beta_t  = c_beta / t^tau_beta          (0 < tau_beta < 1/2)
//   gamma_t = c_gamma / sqrt(t * max(ln ln t, 1))
//
// All three are strictly positive and non-increasing; alpha and beta decay
// strictly for t >= 1, gamma once the ln-ln clamp releases (t >= 16).
struct WeightSchedule {
    double c_alpha = 40.0;
    double c_beta = 0.3;
    double tau_beta = 0.25;
    double c_gamma = 1.0;
    // The convergence theory additionally needs c_gamma^2/c_alpha above a
    // constant whose value is not computable here. When the user supplies a
    // stand-in bound it is enforced; when unset the ratio is only reported.
    std::optional<double> c0_bound;

    StepWeights at(std::int64_t t) const;  // t >= 1; throws std::domain_error
    double gamma2_over_alpha(std::int64_t t) const;

    // Violated constraints by name; empty means the schedule is admissible.
    std::vector<std::string> violations() const;
    // Throws std::invalid_argument listing every violation.
    void validate() const;
};

}  // namespace danneal
