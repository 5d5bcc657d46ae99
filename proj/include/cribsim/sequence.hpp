#ifndef CRIBSIM_SEQUENCE_HPP
#define CRIBSIM_SEQUENCE_HPP

#include <string>
#include <vector>

namespace cribsim {

/// Timing budget of one preparation + storage cycle [defaults in ms/us as named].
struct SequenceTiming {
    double preparation_ms = 120.0;
    double stimulation_tail_ms = 23.5;
    double wait_before_storage_ms = 86.0;
    double trial_period_us = 5.0;
    long long trials = 8000;
    double repetition_rate_hz = 3.0;
    double zeeman_lifetime_ms = 130.0;

    void validate() const;
};

struct SequenceCheck {
    std::string name;
    double value_ms = 0.0;
    double limit_ms = 0.0;
    double slack_ms = 0.0; // limit - value; negative means violated
    bool ok = false;
};

struct SequenceReport {
    std::vector<SequenceCheck> checks;
    bool all_ok = false;
};

/// Checks that the storage block finishes within the ground-state lifetime
/// and that the whole cycle fits into one repetition period. Violations are
/// reported, not thrown.
SequenceReport validate_sequence(const SequenceTiming& timing);

} // namespace cribsim

#endif
