#ifndef CRIBSIM_SPECTRAL_HPP
#define CRIBSIM_SPECTRAL_HPP

#include <cmath>

namespace cribsim {

/// Prepared absorption structure: a gaussian peak on a flat absorbing
/// background. Depths are dimensionless optical depths (intensity
/// transmission through depth d is exp(-d)), widths in Hz.
struct SpectralProfile {
    double d_peak = 0.0;          // optical depth at peak center
    double sigma = 0.0;           // peak standard deviation [Hz]
    double d_background = 0.0;    // flat background depth d0
    double center_detuning = 0.0; // peak center in the rotating frame [Hz]

    void validate() const;

    /// Integrated depth of the peak (excluding background) [Hz].
    double peak_area() const { return d_peak * sigma * std::sqrt(2.0 * M_PI); }
};

/// Stark-field control: how much the line is broadened while the field is
/// on, and when the polarity flips. switch_time is measured from the
/// input-pulse center. The switch is instantaneous: exactly two segments.
struct StarkSchedule {
    double broadening_factor = 1.0; // total width ratio b >= 1
    double switch_time = 0.0;       // [s]
    double voltage = 0.0;           // informational [V]
    double volts_to_factor = 0.0;   // calibration constant [1/V]

    void validate() const;

    int polarity(double t) const { return t < switch_time ? +1 : -1; }
};

/// Build a profile from the peak's full width at half maximum.
SpectralProfile gaussian_peak_profile(double d_peak, double fwhm, double d_background);

/// d(detuning) = d_background + d_peak * exp(-(detuning-center)^2 / (2 sigma^2))
double optical_depth_at(const SpectralProfile& profile, double detuning);

/// Width x factor, height / factor; spectral area of the peak is conserved.
SpectralProfile apply_broadening(const SpectralProfile& profile, double factor);

/// Affine voltage calibration: factor = 1 + volts_to_factor * voltage.
double broadening_from_voltage(double voltage, double volts_to_factor);

constexpr double fwhm_to_sigma(double fwhm) { return fwhm / 2.3548200450309493; } // 2*sqrt(2 ln 2)

} // namespace cribsim

#endif
