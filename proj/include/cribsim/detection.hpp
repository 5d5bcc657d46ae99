#ifndef CRIBSIM_DETECTION_HPP
#define CRIBSIM_DETECTION_HPP

#include <cstdint>
#include <vector>

#include "cribsim/propagation.hpp"

namespace cribsim {

/// Photon-counting chain: system transmission, detector efficiency, dark
/// counts and a flat residual noise floor. Weak coherent input plus linear
/// loss gives exactly Poisson counts per trial, so trials are sampled in
/// fixed blocks of kTrialBlock with one derived RNG stream per block; the
/// block layout depends only on the trial count, which makes partitioned
/// and single-threaded execution identical for a given seed.
struct DetectionModel {
    double transmission = 0.16;
    double detector_efficiency = 0.07;
    double dark_rate = 10.0;        // [1/s]
    double noise_floor_rate = 1.9;  // [1/s], calibrated; see calibrate_noise_floor
    double bin_width = 50e-9;       // [s]
    long long trials = 8000;
    std::uint64_t rng_seed = 1;

    void validate() const;
};

constexpr long long kTrialBlock = 65536;

struct Histogram {
    double bin_start = 0.0; // [s]
    double bin_width = 0.0; // [s]
    std::vector<long long> counts;
    long long trials = 0;
};

/// Mean counts per trial per bin: detected signal flux integrated over the
/// bin plus (dark + noise floor) * bin_width.
std::vector<double> expected_counts_per_bin(const FieldTrace& trace, const DetectionModel& model);

/// Poisson-sample the histogram over model.trials; reproducible for a seed.
Histogram simulate_histogram(const FieldTrace& trace, const DetectionModel& model);

struct Window {
    double start = 0.0;
    double end = 0.0;
};

/// (signal counts - scaled noise estimate) / scaled noise estimate, with the
/// noise window rescaled to the signal duration. Returns +infinity when the
/// noise estimate is zero (flagged upstream).
double snr(const Histogram& hist, const Window& signal_window, const Window& noise_window);

/// Counts minus the expected dark contribution per bin (real-valued, may be
/// negative).
std::vector<double> subtract_dark_counts(const Histogram& hist, const DetectionModel& model);

/// Residual noise floor rate that makes the expected dark-subtracted SNR of
/// the given per-trial echo rate equal target_snr over the signal window.
double calibrate_noise_floor(double echo_counts_per_trial, double signal_window_duration,
                             double target_snr);

struct LinearityScenario {
    FieldTrace unit_trace; // exit-face trace normalized to nbar = 1
    DetectionModel model;
    Window signal_window;
    Window noise_window;
};

struct LinearityResult {
    struct Row {
        double nbar = 0.0;
        double echo_counts = 0.0;    // dark- and floor-subtracted signal counts
        double expected_counts = 0.0;
        double snr = 0.0;
    };
    std::vector<Row> rows;
    double counts_slope = 0.0; // log-log regression slopes
    double snr_slope = 0.0;
    bool slopes_defined = false;
    bool snr_infinite = false;
};

/// Full pipeline per mean photon number: scale the unit trace, sample a
/// histogram (per-point derived seed), extract echo counts and SNR, and
/// regress both against nbar in log-log space.
LinearityResult linearity_scan(const std::vector<double>& nbar_values,
                               const LinearityScenario& scenario);

/// Deterministic Poisson sampler used by the histogram simulator (exposed
/// for the statistical test suite).
std::uint64_t splitmix64(std::uint64_t x);
long long poisson_sample(std::uint64_t& state, double mu);

} // namespace cribsim

#endif
