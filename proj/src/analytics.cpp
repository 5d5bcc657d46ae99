#include "cribsim/analytics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cribsim {

double eta_crib(double d, double gamma_tilde, double t) {
    if (d < 0.0 || gamma_tilde < 0.0 || t < 0.0)
        throw std::invalid_argument("eta_crib: arguments must be >= 0");
    const double phase = t * gamma_tilde;
    return d * d * std::exp(-d) * std::exp(-phase * phase);
}

double eta_total(double d, double d0, double gamma_tilde, double t) {
    if (d0 < 0.0)
        throw std::invalid_argument("eta_total: d0 must be >= 0");
    return eta_crib(d, gamma_tilde, t) * std::exp(-d0);
}

double gamma_tilde_from_sigma(double sigma) {
    if (sigma < 0.0)
        throw std::invalid_argument("gamma_tilde_from_sigma: sigma must be >= 0");
    return 2.0 * M_PI * sigma;
}

double decay_time_from_sigma(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("decay_time_from_sigma: sigma must be > 0");
    return 1.0 / (2.0 * M_PI * sigma);
}

double homogeneous_linewidth(double T2) {
    if (!(T2 > 0.0))
        throw std::invalid_argument("homogeneous_linewidth: T2 must be > 0");
    return 1.0 / (M_PI * T2);
}

std::pair<double, double> optimal_forward_depth() {
    return {2.0, 4.0 * std::exp(-2.0)};
}

DecayFit fit_gaussian_decay(const std::vector<std::pair<double, double>>& points) {
    std::vector<double> x, y; // x = t^2, y = ln eta
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& [t, eta] : points) {
        if (t < 0.0)
            throw std::invalid_argument("fit_gaussian_decay: times must be >= 0");
        if (eta > 0.0 && std::isfinite(eta)) {
            x.push_back(t * t);
            y.push_back(std::log(eta));
        }
    }
    if (x.size() < 3)
        throw std::runtime_error("fit_gaussian_decay: fewer than 3 usable points");

    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw std::runtime_error("fit_gaussian_decay: degenerate abscissae (all times equal)");

    const double slope = sxy / sxx;       // = -1/tau^2
    const double intercept = my - slope * mx;

    DecayFit fit;
    fit.amplitude = std::exp(intercept);
    if (slope < 0.0) {
        fit.decay_time = 1.0 / std::sqrt(-slope);
    } else {
        fit.degenerate = true;
        fit.decay_time = std::numeric_limits<double>::infinity();
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        ss += r * r;
    }
    fit.residual_norm = std::sqrt(ss);
    return fit;
}

} // namespace cribsim
