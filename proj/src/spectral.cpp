#include "cribsim/spectral.hpp"

#include <stdexcept>

namespace cribsim {

void SpectralProfile::validate() const {
    if (!(d_peak >= 0.0))
        throw std::invalid_argument("SpectralProfile: d_peak must be >= 0");
    if (!(sigma > 0.0))
        throw std::invalid_argument("SpectralProfile: sigma must be > 0");
    if (!(d_background >= 0.0))
        throw std::invalid_argument("SpectralProfile: d_background must be >= 0");
    if (!std::isfinite(center_detuning))
        throw std::invalid_argument("SpectralProfile: center_detuning must be finite");
}

void StarkSchedule::validate() const {
    if (!(broadening_factor >= 1.0))
        throw std::invalid_argument("StarkSchedule: broadening_factor must be >= 1");
    if (!(switch_time > 0.0))
        throw std::invalid_argument("StarkSchedule: switch_time must be > 0");
}

SpectralProfile gaussian_peak_profile(double d_peak, double fwhm, double d_background) {
    if (!(fwhm > 0.0))
        throw std::invalid_argument("gaussian_peak_profile: fwhm must be > 0");
    if (d_peak < 0.0 || d_background < 0.0)
        throw std::invalid_argument("gaussian_peak_profile: depths must be >= 0");
    SpectralProfile p;
    p.d_peak = d_peak;
    p.sigma = fwhm_to_sigma(fwhm);
    p.d_background = d_background;
    return p;
}

double optical_depth_at(const SpectralProfile& profile, double detuning) {
    const double x = detuning - profile.center_detuning;
    return profile.d_background +
           profile.d_peak * std::exp(-x * x / (2.0 * profile.sigma * profile.sigma));
}

SpectralProfile apply_broadening(const SpectralProfile& profile, double factor) {
    if (!(factor >= 1.0))
        throw std::invalid_argument("apply_broadening: factor must be >= 1 (narrowing is not modeled)");
    SpectralProfile out = profile;
    out.sigma = profile.sigma * factor;
    out.d_peak = profile.d_peak / factor;
    return out;
}

double broadening_from_voltage(double voltage, double volts_to_factor) {
    if (voltage < 0.0)
        throw std::invalid_argument("broadening_from_voltage: voltage must be >= 0");
    if (volts_to_factor < 0.0)
        throw std::invalid_argument("broadening_from_voltage: volts_to_factor must be >= 0");
    return 1.0 + volts_to_factor * voltage;
}

} // namespace cribsim
