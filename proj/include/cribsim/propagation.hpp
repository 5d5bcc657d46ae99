#ifndef CRIBSIM_PROPAGATION_HPP
#define CRIBSIM_PROPAGATION_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cribsim/spectral.hpp"

namespace cribsim {

using cplx = std::complex<double>;

/// Complex field envelope on a uniform time grid, normalized so that
/// sum(|E|^2) * dt equals the mean photon number of the segment.
struct FieldTrace {
    double t0 = 0.0; // [s]
    double dt = 0.0; // [s]
    std::vector<cplx> samples;

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double t_end() const { return samples.empty() ? t0 : time_at(samples.size() - 1); }

    /// Mean photon number: sum |E|^2 dt.
    double photon_norm() const;
    /// Photon norm restricted to [a, b].
    double window_energy(double a, double b) const;
    /// |E|^2-weighted mean time within [a, b].
    double centroid(double a, double b) const;
};

enum class PulseShape { gaussian, square };

struct PulseSpec {
    PulseShape shape = PulseShape::gaussian;
    double duration = 0.0;         // intensity FWHM (gaussian) or full width (square) [s]
    double mean_photons = 0.0;
    double carrier_detuning = 0.0; // [Hz]
    double center_time = 0.0;      // [s]

    void validate() const;
};

/// Numerical parameters of one propagation run. The detuning grid is
/// centered on the profile's peak; depth is normalized to [0, 1].
struct SimGrid {
    int n_z = 100;
    int n_detuning = 512;
    double detuning_span = 0.0; // full grid width [Hz]
    double t_start = 0.0;       // [s]
    double t_end = 0.0;         // [s]
    double dt = 0.0;            // [s]
    double T2 = 0.0;            // homogeneous coherence time [s]

    void validate() const;
    std::size_t n_steps() const;
};

/// Thrown when the integration produces a non-finite field.
class numerical_failure : public std::runtime_error {
public:
    numerical_failure(const std::string& what, long step, int depth_index)
        : std::runtime_error(what), step(step), depth_index(depth_index) {}
    long step = -1;
    int depth_index = -1;
};

/// Sample a pulse onto the grid; the photon norm matches spec.mean_photons
/// to relative 1e-9 by construction.
FieldTrace make_pulse(const PulseSpec& spec, const SimGrid& grid);

/// Propagate the input through the broadened line with the polarity switch
/// and return the exit-face field over the full window (transmitted pulse
/// plus echo). The profile passed in is the unbroadened prepared one;
/// schedule.broadening_factor is applied internally. The background depth
/// acts as a flat passive loss exp(-d0/2) on the output amplitude.
FieldTrace simulate_crib(const FieldTrace& input, const SpectralProfile& profile,
                         const StarkSchedule& schedule, const SimGrid& grid);

/// Switch-caused part of the output: simulate_crib with the schedule minus
/// an identical run with fixed polarity. By linearity this isolates the
/// rephasing emission from the transmitted pulse and free-induction tail.
FieldTrace crib_echo_component(const FieldTrace& input, const SpectralProfile& profile,
                               const StarkSchedule& schedule, const SimGrid& grid);

/// Intensity transmission of a long quasi-monochromatic probe at the given
/// detuning, fixed polarity. Converges to exp(-d(detuning)) of the
/// broadened profile as probe bandwidth -> 0 and T2 -> infinity. The time
/// window is built internally from the probe duration and T2; n_z,
/// n_detuning, detuning_span, dt and T2 are taken from the grid.
double monochromatic_transmission(const SpectralProfile& profile, const StarkSchedule& schedule,
                                  double detuning, const SimGrid& grid);

/// Echo-window energy of `output` over total energy of `input`. The window
/// is [2 tau_s - w, 2 tau_s + w] around the input pulse center with
/// w = 1.5 x pulse duration; center and duration are measured from the
/// input trace itself (intensity centroid and FWHM).
double echo_efficiency(const FieldTrace& output, const FieldTrace& input,
                       const StarkSchedule& schedule);

struct ScanPoint {
    double storage_time = 0.0; // 2 x switch_time [s]
    double efficiency = 0.0;
};

/// One isolated-echo run per switch time; storage time reported as
/// 2 x switch_time. Runs are independent and executed concurrently.
std::vector<ScanPoint> decay_scan(const PulseSpec& pulse, const SpectralProfile& profile,
                                  double factor, const std::vector<double>& switch_times,
                                  const SimGrid& grid);

/// Intensity FWHM of |E|^2 of a trace (used for echo windows).
double intensity_fwhm(const FieldTrace& trace);
/// |E|^2-weighted mean time of the whole trace.
double intensity_centroid(const FieldTrace& trace);

} // namespace cribsim

#endif
