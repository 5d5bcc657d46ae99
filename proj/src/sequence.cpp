#include "cribsim/sequence.hpp"

#include <stdexcept>

namespace cribsim {

void SequenceTiming::validate() const {
    const bool ok = preparation_ms > 0 && stimulation_tail_ms > 0 &&
                    wait_before_storage_ms > 0 && trial_period_us > 0 && trials > 0 &&
                    repetition_rate_hz > 0 && zeeman_lifetime_ms > 0;
    if (!ok)
        throw std::invalid_argument("SequenceTiming: all fields must be positive");
}

SequenceReport validate_sequence(const SequenceTiming& timing) {
    timing.validate();

    const double storage_block_ms =
        static_cast<double>(timing.trials) * timing.trial_period_us * 1e-3;
    const double storage_end_ms = timing.wait_before_storage_ms + storage_block_ms;
    const double cycle_ms = timing.preparation_ms + storage_end_ms;
    const double period_ms = 1e3 / timing.repetition_rate_hz;

    SequenceReport report;
    auto add = [&report](const std::string& name, double value, double limit) {
        SequenceCheck c;
        c.name = name;
        c.value_ms = value;
        c.limit_ms = limit;
        c.slack_ms = limit - value;
        c.ok = value <= limit;
        report.checks.push_back(c);
    };
    add("storage_block_within_ground_state_lifetime", storage_end_ms, timing.zeeman_lifetime_ms);
    add("cycle_within_repetition_period", cycle_ms, period_ms);
    add("stimulation_tail_within_wait", timing.stimulation_tail_ms, timing.wait_before_storage_ms);

    report.all_ok = true;
    for (const auto& c : report.checks)
        report.all_ok = report.all_ok && c.ok;
    return report;
}

} // namespace cribsim
