#ifndef CRIBSIM_SCENARIOS_HPP
#define CRIBSIM_SCENARIOS_HPP

#include <string>

#include "cribsim/config.hpp"
#include "cribsim/outputs.hpp"

namespace cribsim {

/// Named end-to-end pipelines. "echo-histogram" produces the stored-and-
/// retrieved pulse counting histogram, "no-peak-control" repeats it without
/// the narrow absorption peak, "decay-scan" sweeps storage time and fits the
/// efficiency decay, "linearity" sweeps the mean photon number, "fit-decay"
/// fits an existing scan table, and "sequence-check" audits the timing
/// budget.
ResultBundle run_scenario(const std::string& name, const ScenarioConfig& config);

/// Everything the echo pipeline produces for one configuration.
struct EchoRun {
    FieldTrace input;
    FieldTrace raw_output; // transmitted pulse + echo at the exit face
    FieldTrace echo;       // switch-caused component only
    StarkSchedule schedule;
    SimGrid grid;
    double efficiency = 0.0;
    Window signal_window;
    Window noise_window;
};

/// Run the propagation pipeline of the current config. d_peak_override >= 0
/// replaces the profile's peak depth (used by the no-peak control). When
/// with_noise_pad is set the window is extended before the pulse so the
/// detection stage has a signal-free noise region.
EchoRun run_echo_pipeline(const ScenarioConfig& config, double d_peak_override = -1.0,
                          bool with_noise_pad = false);

} // namespace cribsim

#endif
