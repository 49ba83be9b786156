#include "danneal/schedules.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace danneal {

double loglog_floor(std::int64_t t) {
    if (t < 1) throw std::domain_error("loglog_floor: t must be >= 1");
    // log(log(1)) = -inf in IEEE arithmetic; the max still yields 1.
    const double ll = std::log(std::log(static_cast<double>(t)));
    return std::max(ll, 1.0);
}

StepWeights WeightSchedule::at(std::int64_t t) const {
    if (t < 1) throw std::domain_error("WeightSchedule::at: t must be >= 1");
    const double td = static_cast<double>(t);
    return {c_alpha / td, c_beta / std::pow(td, tau_beta),
            c_gamma / std::sqrt(td * loglog_floor(t))};
}

double WeightSchedule::gamma2_over_alpha(std::int64_t t) const {
    if (t < 1) throw std::domain_error("WeightSchedule::gamma2_over_alpha: t must be >= 1");
    return (c_gamma * c_gamma / c_alpha) / loglog_floor(t);
}

std::vector<std::string> WeightSchedule::violations() const {
    std::vector<std::string> v;
    if (!(c_alpha > 0.0)) v.push_back("c_alpha must be positive");
    if (!(c_beta > 0.0)) v.push_back("c_beta must be positive");
    if (!(c_gamma > 0.0)) v.push_back("c_gamma must be positive");
    if (!(tau_beta > 0.0 && tau_beta < 0.5)) v.push_back("tau_beta out of (0, 1/2)");
    if (c0_bound) {
        if (!(*c0_bound > 0.0)) {
            v.push_back("c0_bound must be positive");
        } else if (!(c_gamma * c_gamma / c_alpha > *c0_bound)) {
            v.push_back("c_gamma^2/c_alpha must exceed c0_bound");
        }
    }
    return v;
}

void WeightSchedule::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid weight schedule:";
    for (const auto& s : v) msg << " [" << s << "]";
    throw std::invalid_argument(msg.str());
}

}  // namespace danneal
