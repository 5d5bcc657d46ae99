#ifndef CRIBSIM_ANALYTICS_HPP
#define CRIBSIM_ANALYTICS_HPP

#include <utility>
#include <vector>

namespace cribsim {

/// Result of fitting eta(t) = amplitude * exp(-(t/decay_time)^2).
/// When the data show no decay (non-negative slope in log space) the fit is
/// flagged degenerate and decay_time is meaningless (set to infinity).
struct DecayFit {
    double amplitude = 0.0;
    double decay_time = 0.0;    // 1/e time [s]
    double residual_norm = 0.0; // L2 norm of log-space residuals
    bool degenerate = false;
};

/// Forward-recall efficiency: d^2 exp(-d) exp(-t^2 gamma_tilde^2).
double eta_crib(double d, double gamma_tilde, double t);

/// eta_crib attenuated by the flat background: * exp(-d0).
double eta_total(double d, double d0, double gamma_tilde, double t);

/// Angular spectral width [rad/s] from the peak standard deviation [Hz].
double gamma_tilde_from_sigma(double sigma);

/// 1/e efficiency decay time [s] for a gaussian peak of std sigma [Hz].
double decay_time_from_sigma(double sigma);

/// Lorentzian full width 1/(pi T2) [Hz].
double homogeneous_linewidth(double T2);

/// Depth maximizing d^2 exp(-d) and the value there: (2, 4 e^-2).
std::pair<double, double> optimal_forward_depth();

/// Least-squares fit of ln(eta) against t^2. Points with eta <= 0 are
/// skipped; at least 3 usable points are required.
DecayFit fit_gaussian_decay(const std::vector<std::pair<double, double>>& points);

} // namespace cribsim

#endif
