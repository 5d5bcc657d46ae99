#include "cribsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace cribsim {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw config_error("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw config_error("config: key '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(parse_double(key, item));
    }
    if (out.empty())
        throw config_error("config: key '" + key + "' expects a comma-separated list");
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ",";
        out += fmt_double(v[i]);
    }
    return out;
}

} // namespace

void ScenarioConfig::set_key(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "profile.d_peak")
        profile_d_peak = parse_double(key, v);
    else if (key == "profile.fwhm_hz")
        profile_fwhm_hz = parse_double(key, v);
    else if (key == "profile.d_background")
        profile_d_background = parse_double(key, v);
    else if (key == "profile.center_hz")
        profile_center_hz = parse_double(key, v);
    else if (key == "pulse.shape") {
        if (v != "gaussian" && v != "square")
            throw config_error("config: pulse.shape must be gaussian or square, got '" + v + "'");
        pulse_shape = v;
    } else if (key == "pulse.duration_s")
        pulse_duration_s = parse_double(key, v);
    else if (key == "pulse.mean_photons")
        pulse_mean_photons = parse_double(key, v);
    else if (key == "pulse.carrier_hz")
        pulse_carrier_hz = parse_double(key, v);
    else if (key == "stark.factor")
        stark_factor = parse_double(key, v);
    else if (key == "stark.voltage_v")
        stark_voltage_v = parse_double(key, v);
    else if (key == "stark.volts_to_factor")
        stark_volts_to_factor = parse_double(key, v);
    else if (key == "stark.switch_time_s")
        stark_switch_time_s = parse_double(key, v);
    else if (key == "scan.storage_times_ns")
        scan_storage_times_ns = parse_list(key, v);
    else if (key == "scan.exclude_first_point")
        scan_exclude_first_point = parse_bool(key, v);
    else if (key == "scan.pulse_duration_s")
        scan_pulse_duration_s = parse_double(key, v);
    else if (key == "linearity.nbar_values")
        linearity_nbar = parse_list(key, v);
    else if (key == "linearity.trials")
        linearity_trials = parse_int(key, v);
    else if (key == "grid.n_z")
        grid_n_z = static_cast<int>(parse_int(key, v));
    else if (key == "grid.n_detuning")
        grid_n_detuning = static_cast<int>(parse_int(key, v));
    else if (key == "grid.span_sigma_b")
        grid_span_sigma_b = parse_double(key, v);
    else if (key == "grid.dt_s")
        grid_dt_s = parse_double(key, v);
    else if (key == "grid.t_start_s")
        grid_t_start_s = parse_double(key, v);
    else if (key == "grid.t_end_s")
        grid_t_end_s = parse_double(key, v);
    else if (key == "grid.T2_s")
        grid_T2_s = parse_double(key, v);
    else if (key == "detection.transmission")
        detection_transmission = parse_double(key, v);
    else if (key == "detection.detector_efficiency")
        detection_detector_efficiency = parse_double(key, v);
    else if (key == "detection.dark_rate_hz")
        detection_dark_rate_hz = parse_double(key, v);
    else if (key == "detection.noise_floor_rate_hz")
        detection_noise_floor_rate_hz = parse_double(key, v);
    else if (key == "detection.bin_width_s")
        detection_bin_width_s = parse_double(key, v);
    else if (key == "detection.trials")
        detection_trials = parse_int(key, v);
    else if (key == "sequence.preparation_ms")
        sequence.preparation_ms = parse_double(key, v);
    else if (key == "sequence.stimulation_tail_ms")
        sequence.stimulation_tail_ms = parse_double(key, v);
    else if (key == "sequence.wait_before_storage_ms")
        sequence.wait_before_storage_ms = parse_double(key, v);
    else if (key == "sequence.trial_period_us")
        sequence.trial_period_us = parse_double(key, v);
    else if (key == "sequence.trials")
        sequence.trials = parse_int(key, v);
    else if (key == "sequence.repetition_rate_hz")
        sequence.repetition_rate_hz = parse_double(key, v);
    else if (key == "sequence.zeeman_lifetime_ms")
        sequence.zeeman_lifetime_ms = parse_double(key, v);
    else if (key == "fit.input_csv")
        fit_input_csv = v;
    else if (key == "seed")
        seed = static_cast<std::uint64_t>(parse_int(key, v));
    else
        throw config_error("config: unknown key '" + key + "'");
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
    ScenarioConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
        cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream out;
    out << "profile.d_peak = " << fmt_double(profile_d_peak) << "\n";
    out << "profile.fwhm_hz = " << fmt_double(profile_fwhm_hz) << "\n";
    out << "profile.d_background = " << fmt_double(profile_d_background) << "\n";
    out << "profile.center_hz = " << fmt_double(profile_center_hz) << "\n";
    out << "pulse.shape = " << pulse_shape << "\n";
    out << "pulse.duration_s = " << fmt_double(pulse_duration_s) << "\n";
    out << "pulse.mean_photons = " << fmt_double(pulse_mean_photons) << "\n";
    out << "pulse.carrier_hz = " << fmt_double(pulse_carrier_hz) << "\n";
    out << "stark.factor = " << fmt_double(stark_factor) << "\n";
    out << "stark.voltage_v = " << fmt_double(stark_voltage_v) << "\n";
    out << "stark.volts_to_factor = " << fmt_double(stark_volts_to_factor) << "\n";
    out << "stark.switch_time_s = " << fmt_double(stark_switch_time_s) << "\n";
    out << "scan.storage_times_ns = " << join_list(scan_storage_times_ns) << "\n";
    out << "scan.exclude_first_point = " << (scan_exclude_first_point ? "true" : "false") << "\n";
    out << "scan.pulse_duration_s = " << fmt_double(scan_pulse_duration_s) << "\n";
    out << "linearity.nbar_values = " << join_list(linearity_nbar) << "\n";
    out << "linearity.trials = " << linearity_trials << "\n";
    out << "grid.n_z = " << grid_n_z << "\n";
    out << "grid.n_detuning = " << grid_n_detuning << "\n";
    out << "grid.span_sigma_b = " << fmt_double(grid_span_sigma_b) << "\n";
    out << "grid.dt_s = " << fmt_double(grid_dt_s) << "\n";
    out << "grid.t_start_s = " << fmt_double(grid_t_start_s) << "\n";
    out << "grid.t_end_s = " << fmt_double(grid_t_end_s) << "\n";
    out << "grid.T2_s = " << fmt_double(grid_T2_s) << "\n";
    out << "detection.transmission = " << fmt_double(detection_transmission) << "\n";
    out << "detection.detector_efficiency = " << fmt_double(detection_detector_efficiency) << "\n";
    out << "detection.dark_rate_hz = " << fmt_double(detection_dark_rate_hz) << "\n";
    out << "detection.noise_floor_rate_hz = " << fmt_double(detection_noise_floor_rate_hz) << "\n";
    out << "detection.bin_width_s = " << fmt_double(detection_bin_width_s) << "\n";
    out << "detection.trials = " << detection_trials << "\n";
    out << "sequence.preparation_ms = " << fmt_double(sequence.preparation_ms) << "\n";
    out << "sequence.stimulation_tail_ms = " << fmt_double(sequence.stimulation_tail_ms) << "\n";
    out << "sequence.wait_before_storage_ms = " << fmt_double(sequence.wait_before_storage_ms) << "\n";
    out << "sequence.trial_period_us = " << fmt_double(sequence.trial_period_us) << "\n";
    out << "sequence.trials = " << sequence.trials << "\n";
    out << "sequence.repetition_rate_hz = " << fmt_double(sequence.repetition_rate_hz) << "\n";
    out << "sequence.zeeman_lifetime_ms = " << fmt_double(sequence.zeeman_lifetime_ms) << "\n";
    out << "fit.input_csv = " << fit_input_csv << "\n";
    out << "seed = " << seed << "\n";
    return out.str();
}

SpectralProfile ScenarioConfig::profile() const {
    SpectralProfile p = gaussian_peak_profile(profile_d_peak, profile_fwhm_hz, profile_d_background);
    p.center_detuning = profile_center_hz;
    return p;
}

double ScenarioConfig::broadening() const {
    if (stark_factor > 0.0)
        return stark_factor;
    return broadening_from_voltage(stark_voltage_v, stark_volts_to_factor);
}

StarkSchedule ScenarioConfig::schedule() const {
    StarkSchedule s;
    s.broadening_factor = broadening();
    s.switch_time = stark_switch_time_s;
    s.voltage = stark_voltage_v;
    s.volts_to_factor = stark_volts_to_factor;
    return s;
}

PulseSpec ScenarioConfig::pulse() const {
    PulseSpec p;
    p.shape = pulse_shape == "square" ? PulseShape::square : PulseShape::gaussian;
    p.duration = pulse_duration_s;
    p.mean_photons = pulse_mean_photons;
    p.carrier_detuning = pulse_carrier_hz;
    p.center_time = 0.0;
    return p;
}

DetectionModel ScenarioConfig::detection_model() const {
    DetectionModel m;
    m.transmission = detection_transmission;
    m.detector_efficiency = detection_detector_efficiency;
    m.dark_rate = detection_dark_rate_hz;
    m.noise_floor_rate = detection_noise_floor_rate_hz;
    m.bin_width = detection_bin_width_s;
    m.trials = detection_trials;
    m.rng_seed = seed;
    return m;
}

SimGrid ScenarioConfig::make_grid(double duration, double t_lo, double t_hi) const {
    const double sigma_b = fwhm_to_sigma(profile_fwhm_hz) * broadening();
    SimGrid g;
    g.n_z = grid_n_z;
    g.n_detuning = grid_n_detuning;
    g.detuning_span = grid_span_sigma_b * sigma_b;
    g.T2 = grid_T2_s;
    g.dt = grid_dt_s > 0.0 ? grid_dt_s
                           : std::min(0.1 / (M_PI * g.detuning_span), duration / 50.0);
    const bool auto_window = grid_t_start_s == 0.0 && grid_t_end_s == 0.0;
    g.t_start = auto_window ? t_lo : grid_t_start_s;
    const double span = (auto_window ? t_hi : grid_t_end_s) - g.t_start;
    g.t_end = g.t_start + std::ceil(span / g.dt) * g.dt;
    return g;
}

void ScenarioConfig::validate() const {
    auto wrap = [](const char* section, const std::function<void()>& f) {
        try {
            f();
        } catch (const std::exception& e) {
            throw config_error(std::string("config: section '") + section + "': " + e.what());
        }
    };
    wrap("profile", [&] { profile().validate(); });
    wrap("stark", [&] { schedule().validate(); });
    wrap("pulse", [&] { pulse().validate(); });
    wrap("detection", [&] { detection_model().validate(); });
    wrap("sequence", [&] { sequence.validate(); });
    wrap("scan", [&] {
        if (scan_storage_times_ns.empty())
            throw std::invalid_argument("storage time list is empty");
        for (double t : scan_storage_times_ns)
            if (!(t > 0.0))
                throw std::invalid_argument("storage times must be > 0");
        if (!(scan_pulse_duration_s > 0.0))
            throw std::invalid_argument("scan pulse duration must be > 0");
    });
    wrap("linearity", [&] {
        for (double nb : linearity_nbar)
            if (!(nb > 0.0))
                throw std::invalid_argument("nbar values must be > 0");
        if (linearity_trials < 1)
            throw std::invalid_argument("linearity trials must be >= 1");
    });
    wrap("grid", [&] {
        SimGrid g = make_grid(pulse_duration_s, -3.0 * pulse_duration_s, 3.0 * pulse_duration_s + 1e-6);
        g.validate();
    });
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
    return serialize() == other.serialize();
}

} // namespace cribsim
