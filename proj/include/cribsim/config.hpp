#ifndef CRIBSIM_CONFIG_HPP
#define CRIBSIM_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "cribsim/detection.hpp"
#include "cribsim/propagation.hpp"
#include "cribsim/sequence.hpp"
#include "cribsim/spectral.hpp"

namespace cribsim {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key = value scenario configuration with dotted section names.
/// Unknown keys are rejected on load; every value is re-validated against
/// the component invariants before a scenario runs. Defaults reproduce the
/// published storage experiment.
struct ScenarioConfig {
    // profile
    double profile_d_peak = 0.5;
    double profile_fwhm_hz = 1.0e6;
    double profile_d_background = 1.6;
    double profile_center_hz = 0.0;
    // pulse
    std::string pulse_shape = "gaussian";
    double pulse_duration_s = 200e-9;
    double pulse_mean_photons = 10.0;
    double pulse_carrier_hz = 0.0;
    // stark control; factor <= 0 means "derive from voltage"
    double stark_factor = 0.0;
    double stark_voltage_v = 50.0;
    double stark_volts_to_factor = 0.04;
    double stark_switch_time_s = 150e-9;
    // storage-time sweep
    std::vector<double> scan_storage_times_ns = {100, 200, 300, 400, 500, 600, 700};
    bool scan_exclude_first_point = true;
    double scan_pulse_duration_s = 40e-9;
    // linearity sweep
    std::vector<double> linearity_nbar = {0.6, 1.25, 2.5, 5.0, 10.0};
    long long linearity_trials = 200000000;
    // grid; dt_s = 0 and t_start_s = t_end_s = 0 select automatic values
    int grid_n_z = 100;
    int grid_n_detuning = 512;
    double grid_span_sigma_b = 20.0;
    double grid_dt_s = 0.0;
    double grid_t_start_s = 0.0;
    double grid_t_end_s = 0.0;
    double grid_T2_s = 2e-6;
    // detection
    double detection_transmission = 0.16;
    double detection_detector_efficiency = 0.07;
    double detection_dark_rate_hz = 10.0;
    double detection_noise_floor_rate_hz = 1.87;
    double detection_bin_width_s = 50e-9;
    long long detection_trials = 4800000;
    // sequence timing
    SequenceTiming sequence;
    // decay-fit input for the fit-decay scenario
    std::string fit_input_csv;
    // reproducibility
    std::uint64_t seed = 20100601;

    static ScenarioConfig load(const std::string& path);
    static ScenarioConfig parse(const std::string& text);
    std::string serialize() const;

    /// Apply one "key=value" override (same keys as the file format).
    void set_key(const std::string& key, const std::string& value);

    /// Re-validate every component invariant; throws config_error naming
    /// the offending section.
    void validate() const;

    // Assembled domain objects.
    SpectralProfile profile() const;
    double broadening() const;
    StarkSchedule schedule() const;
    PulseSpec pulse() const;
    DetectionModel detection_model() const;

    /// Grid for a run whose window must span [t_start, t_end] given the
    /// pulse duration (automatic bounds and dt unless overridden).
    SimGrid make_grid(double duration, double t_lo, double t_hi) const;

    bool operator==(const ScenarioConfig& other) const;
};

} // namespace cribsim

#endif
