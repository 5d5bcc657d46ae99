#include "cribsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

namespace cribsim {

namespace {

constexpr double kStabilityMargin = 1.0 + 1e-9;

double sqr(double x) { return x * x; }

} // namespace

double FieldTrace::photon_norm() const {
    double s = 0.0;
    for (const auto& e : samples)
        s += std::norm(e);
    return s * dt;
}

double FieldTrace::window_energy(double a, double b) const {
    double s = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = time_at(i);
        if (t >= a && t <= b)
            s += std::norm(samples[i]);
    }
    return s * dt;
}

double FieldTrace::centroid(double a, double b) const {
    double s = 0.0, st = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = time_at(i);
        if (t >= a && t <= b) {
            const double w = std::norm(samples[i]);
            s += w;
            st += w * t;
        }
    }
    return s > 0.0 ? st / s : 0.5 * (a + b);
}

void PulseSpec::validate() const {
    if (!(duration > 0.0))
        throw std::invalid_argument("PulseSpec: duration must be > 0");
    if (!(mean_photons >= 0.0))
        throw std::invalid_argument("PulseSpec: mean_photons must be >= 0");
    if (!std::isfinite(carrier_detuning) || !std::isfinite(center_time))
        throw std::invalid_argument("PulseSpec: non-finite field");
}

void SimGrid::validate() const {
    if (n_z < 2)
        throw std::invalid_argument("SimGrid: n_z must be >= 2");
    if (n_detuning < 8)
        throw std::invalid_argument("SimGrid: n_detuning must be >= 8");
    if (!(detuning_span > 0.0))
        throw std::invalid_argument("SimGrid: detuning_span must be > 0");
    if (!(dt > 0.0) || !(t_end > t_start))
        throw std::invalid_argument("SimGrid: time window must be positive");
    if (!(T2 > 0.0))
        throw std::invalid_argument("SimGrid: T2 must be > 0");
    if (dt * M_PI * detuning_span > 0.1 * kStabilityMargin)
        throw std::invalid_argument("SimGrid: dt exceeds 0.1/(pi*detuning_span)");
}

std::size_t SimGrid::n_steps() const {
    return static_cast<std::size_t>(std::llround((t_end - t_start) / dt)) + 1;
}

FieldTrace make_pulse(const PulseSpec& spec, const SimGrid& grid) {
    spec.validate();
    grid.validate();

    if (spec.shape == PulseShape::gaussian) {
        if (spec.center_time - 3.0 * spec.duration < grid.t_start ||
            spec.center_time + 3.0 * spec.duration > grid.t_end)
            throw std::invalid_argument("make_pulse: window must contain +-3 durations around center");
    } else {
        if (spec.center_time - 0.5 * spec.duration < grid.t_start ||
            spec.center_time + 0.5 * spec.duration > grid.t_end)
            throw std::invalid_argument("make_pulse: window must contain the square pulse support");
    }
    if (grid.dt > spec.duration / 50.0)
        throw std::invalid_argument("make_pulse: dt must be <= duration/50");

    FieldTrace trace;
    trace.t0 = grid.t_start;
    trace.dt = grid.dt;
    trace.samples.assign(grid.n_steps(), cplx(0.0, 0.0));

    // amplitude sigma such that |E|^2 has FWHM = duration
    const double sigma_a = spec.duration / (2.0 * std::sqrt(std::log(2.0)));
    const double wc = 2.0 * M_PI * spec.carrier_detuning;

    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const double t = trace.time_at(i) - spec.center_time;
        double amp = 0.0;
        if (spec.shape == PulseShape::gaussian) {
            amp = std::exp(-t * t / (2.0 * sigma_a * sigma_a));
        } else {
            amp = std::abs(t) <= 0.5 * spec.duration ? 1.0 : 0.0;
        }
        trace.samples[i] = amp * std::exp(cplx(0.0, -wc * t));
    }

    const double norm = trace.photon_norm();
    if (spec.mean_photons > 0.0 && norm > 0.0) {
        const double scale = std::sqrt(spec.mean_photons / norm);
        for (auto& e : trace.samples)
            e *= scale;
    } else {
        for (auto& e : trace.samples)
            e = cplx(0.0, 0.0);
    }
    return trace;
}

double intensity_centroid(const FieldTrace& trace) {
    return trace.centroid(trace.t0, trace.t_end());
}

double intensity_fwhm(const FieldTrace& trace) {
    const auto& s = trace.samples;
    if (s.size() < 2)
        return 0.0;
    double peak = 0.0;
    for (const auto& e : s)
        peak = std::max(peak, std::norm(e));
    if (peak <= 0.0)
        return 0.0;
    const double half = 0.5 * peak;

    std::size_t first = 0;
    while (first < s.size() && std::norm(s[first]) < half)
        ++first;
    std::size_t last = s.size() - 1;
    while (last > first && std::norm(s[last]) < half)
        --last;

    double t_lo = trace.time_at(first);
    double t_hi = trace.time_at(last);
    // linear interpolation onto the half level at both edges
    if (first > 0) {
        const double a = std::norm(s[first - 1]), b = std::norm(s[first]);
        if (b > a)
            t_lo -= trace.dt * (b - half) / (b - a);
    }
    if (last + 1 < s.size()) {
        const double a = std::norm(s[last]), b = std::norm(s[last + 1]);
        if (a > b)
            t_hi += trace.dt * (a - half) / (a - b);
    }
    return t_hi - t_lo;
}

namespace {

/// Internal state of one propagation run over the (depth, detuning) grid.
/// Retarded frame: the field at each time step is marched through depth
/// (first-order upwind) from the entrance boundary; polarization classes
/// advance in time with classic RK4.
class Propagator {
public:
    Propagator(const SpectralProfile& unbroadened, const StarkSchedule& schedule,
               const SimGrid& grid)
        : nz_(grid.n_z), ndet_(grid.n_detuning), dz_(1.0 / grid.n_z), dt_(grid.dt) {
        const SpectralProfile broadened = apply_broadening(unbroadened, schedule.broadening_factor);
        if (grid.detuning_span < 10.0 * broadened.sigma)
            throw std::invalid_argument("SimGrid: detuning_span must cover +-5 broadened sigma");

        const double center = unbroadened.center_detuning;
        const double ddelta = grid.detuning_span / (ndet_ - 1);
        delta_.resize(ndet_);
        weights_.resize(ndet_);
        rates_.resize(ndet_);
        for (int j = 0; j < ndet_; ++j) {
            delta_[j] = center - 0.5 * grid.detuning_span + j * ddelta;
            const double x = delta_[j] - center;
            weights_[j] = broadened.d_peak * std::exp(-x * x / (2.0 * sqr(broadened.sigma))) * ddelta;
            rates_[j] = cplx(-1.0 / grid.T2, -2.0 * M_PI * delta_[j]);
        }

        const double b = schedule.broadening_factor;
        if (b > 1.0 && unbroadened.d_peak > 0.0) {
            // Polarity reversal flips only the field-induced part of each
            // ion's detuning. Conditioned on the pre-switch total detuning,
            // the post-switch detuning is gaussian with correlation
            // (2-b^2)/b^2 and spread 2 sigma sqrt(b^2-1)/b.
            const double rho = (2.0 - b * b) / (b * b);
            const double s = 2.0 * unbroadened.sigma * std::sqrt(b * b - 1.0) / b;
            remap_.assign(static_cast<std::size_t>(ndet_) * ndet_, 0.0);
            for (int k = 0; k < ndet_; ++k) {
                const double mu = center + rho * (delta_[k] - center);
                double* row = &remap_[static_cast<std::size_t>(k) * ndet_];
                double sum = 0.0;
                for (int j = 0; j < ndet_; ++j) {
                    row[j] = std::exp(-sqr(delta_[j] - mu) / (2.0 * s * s));
                    sum += row[j];
                }
                if (sum > 0.0) {
                    for (int j = 0; j < ndet_; ++j)
                        row[j] /= sum;
                } else {
                    // kernel narrower than the grid pitch: collapse to the nearest bin
                    const int jn = static_cast<int>(std::clamp(
                        std::llround((mu - delta_[0]) / ddelta), 0LL, static_cast<long long>(ndet_ - 1)));
                    row[jn] = 1.0;
                }
            }
        }
    }

    /// Advance through the whole window; returns the exit-face field.
    /// The detuning remap is applied once the state reaches switch_step.
    std::vector<cplx> run(const std::vector<cplx>& e_in, long long switch_step) const {
        const std::size_t nstate = static_cast<std::size_t>(nz_) * ndet_;
        const long long nt = static_cast<long long>(e_in.size());
        std::vector<cplx> p(nstate, cplx(0.0, 0.0));
        std::vector<cplx> k(nstate), acc(nstate), stage(nstate);
        std::vector<cplx> out(e_in.size());

        const double h = dt_, h2 = 0.5 * dt_, h6 = dt_ / 6.0;

        for (long long n = 0; n < nt; ++n) {
            out[n] = eval(p, e_in[n], k);
            if (!std::isfinite(out[n].real()) || !std::isfinite(out[n].imag()))
                throw numerical_failure("propagation produced a non-finite field", n,
                                        find_bad_depth(p, e_in[n]));
            if (n == nt - 1)
                break;

            const cplx em = 0.5 * (e_in[n] + e_in[n + 1]);
            for (std::size_t i = 0; i < nstate; ++i) {
                acc[i] = k[i];
                stage[i] = p[i] + h2 * k[i];
            }
            eval(stage, em, k);
            for (std::size_t i = 0; i < nstate; ++i) {
                acc[i] += 2.0 * k[i];
                stage[i] = p[i] + h2 * k[i];
            }
            eval(stage, em, k);
            for (std::size_t i = 0; i < nstate; ++i) {
                acc[i] += 2.0 * k[i];
                stage[i] = p[i] + h * k[i];
            }
            eval(stage, e_in[n + 1], k);
            for (std::size_t i = 0; i < nstate; ++i)
                p[i] += h6 * (acc[i] + k[i]);

            if (n + 1 == switch_step && !remap_.empty())
                apply_remap(p, stage);
        }
        return out;
    }

private:
    cplx eval(const std::vector<cplx>& state, cplx e_boundary, std::vector<cplx>& deriv) const {
        cplx e = e_boundary;
        for (int kz = 0; kz < nz_; ++kz) {
            const cplx* row = &state[static_cast<std::size_t>(kz) * ndet_];
            cplx* drow = &deriv[static_cast<std::size_t>(kz) * ndet_];
            double sr = 0.0, si = 0.0;
            for (int j = 0; j < ndet_; ++j) {
                sr += weights_[j] * row[j].real();
                si += weights_[j] * row[j].imag();
                drow[j] = rates_[j] * row[j] + e;
            }
            e -= dz_ * cplx(sr, si);
        }
        return e;
    }

    int find_bad_depth(const std::vector<cplx>& state, cplx e_boundary) const {
        cplx e = e_boundary;
        for (int kz = 0; kz < nz_; ++kz) {
            const cplx* row = &state[static_cast<std::size_t>(kz) * ndet_];
            cplx s(0.0, 0.0);
            for (int j = 0; j < ndet_; ++j)
                s += weights_[j] * row[j];
            e -= dz_ * s;
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
                return kz;
        }
        return -1;
    }

    void apply_remap(std::vector<cplx>& p, std::vector<cplx>& scratch) const {
        for (int kz = 0; kz < nz_; ++kz) {
            cplx* row = &p[static_cast<std::size_t>(kz) * ndet_];
            cplx* tmp = &scratch[0];
            for (int kk = 0; kk < ndet_; ++kk) {
                const double* m = &remap_[static_cast<std::size_t>(kk) * ndet_];
                double rr = 0.0, ri = 0.0;
                for (int j = 0; j < ndet_; ++j) {
                    rr += m[j] * row[j].real();
                    ri += m[j] * row[j].imag();
                }
                tmp[kk] = cplx(rr, ri);
            }
            std::copy(tmp, tmp + ndet_, row);
        }
    }

    int nz_, ndet_;
    double dz_, dt_;
    std::vector<double> delta_;
    std::vector<double> weights_;
    std::vector<cplx> rates_;
    std::vector<double> remap_; // empty when factor == 1 (identity)
};

void check_trace_matches_grid(const FieldTrace& input, const SimGrid& grid) {
    const double eps = 1e-6 * grid.dt;
    if (input.samples.size() != grid.n_steps() || std::abs(input.t0 - grid.t_start) > eps ||
        std::abs(input.dt - grid.dt) > eps)
        throw std::invalid_argument("simulate_crib: input trace does not match the grid");
    for (const auto& e : input.samples)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
            throw std::invalid_argument("simulate_crib: input trace contains non-finite samples");
}

FieldTrace run_once(const FieldTrace& input, const SpectralProfile& profile,
                    const StarkSchedule& schedule, const SimGrid& grid, bool with_switch) {
    profile.validate();
    schedule.validate();
    grid.validate();
    check_trace_matches_grid(input, grid);

    FieldTrace out;
    out.t0 = input.t0;
    out.dt = input.dt;

    if (profile.d_peak <= 0.0) {
        out.samples = input.samples; // transparent except the background
    } else {
        const Propagator prop(profile, schedule, grid);
        long long switch_step = std::numeric_limits<long long>::max();
        if (with_switch) {
            const double t_switch = intensity_centroid(input) + schedule.switch_time;
            switch_step = std::llround((t_switch - grid.t_start) / grid.dt);
        }
        out.samples = prop.run(input.samples, switch_step);
    }

    const double loss = std::exp(-0.5 * profile.d_background);
    for (auto& e : out.samples)
        e *= loss;
    return out;
}

} // namespace

FieldTrace simulate_crib(const FieldTrace& input, const SpectralProfile& profile,
                         const StarkSchedule& schedule, const SimGrid& grid) {
    return run_once(input, profile, schedule, grid, true);
}

FieldTrace crib_echo_component(const FieldTrace& input, const SpectralProfile& profile,
                               const StarkSchedule& schedule, const SimGrid& grid) {
    FieldTrace switched = run_once(input, profile, schedule, grid, true);
    const FieldTrace fixed = run_once(input, profile, schedule, grid, false);
    for (std::size_t i = 0; i < switched.samples.size(); ++i)
        switched.samples[i] -= fixed.samples[i];
    return switched;
}

double monochromatic_transmission(const SpectralProfile& profile, const StarkSchedule& schedule,
                                  double detuning, const SimGrid& grid) {
    profile.validate();
    schedule.validate();
    grid.validate();

    const SpectralProfile broadened = apply_broadening(profile, schedule.broadening_factor);

    // quasi-monochromatic probe: bandwidth 1/20 of the broadened line
    const double bandwidth = std::max(broadened.sigma / 20.0, 1.0 / (40.0 * grid.T2));
    const double duration = 2.0 * std::sqrt(2.0 * std::log(2.0)) / (2.0 * M_PI * bandwidth);

    SimGrid window = grid;
    window.t_start = -1.5 * duration;
    window.t_end = 1.5 * duration + std::min(3.0 * grid.T2, 30.0 * duration);

    FieldTrace probe;
    probe.t0 = window.t_start;
    probe.dt = window.dt;
    probe.samples.resize(window.n_steps());
    const double sigma_a = duration / (2.0 * std::sqrt(std::log(2.0)));
    const double wc = 2.0 * M_PI * detuning;
    for (std::size_t i = 0; i < probe.samples.size(); ++i) {
        const double t = probe.time_at(i);
        probe.samples[i] = std::exp(-t * t / (2.0 * sigma_a * sigma_a)) * std::exp(cplx(0.0, -wc * t));
    }

    const FieldTrace out = run_once(probe, profile, schedule, window, false);
    const double ein = probe.photon_norm();
    if (!(ein > 0.0))
        throw std::runtime_error("monochromatic_transmission: empty probe");
    return out.photon_norm() / ein;
}

double echo_efficiency(const FieldTrace& output, const FieldTrace& input,
                       const StarkSchedule& schedule) {
    schedule.validate();
    const double ein = input.photon_norm();
    if (!(ein > 0.0))
        throw std::invalid_argument("echo_efficiency: input has zero energy");

    const double center = intensity_centroid(input);
    const double w = 1.5 * intensity_fwhm(input);
    const double a = center + 2.0 * schedule.switch_time - w;
    const double b = center + 2.0 * schedule.switch_time + w;
    if (a < output.t0 - 0.5 * output.dt || b > output.t_end() + 0.5 * output.dt)
        throw std::invalid_argument("echo_efficiency: echo window lies outside the trace");

    return output.window_energy(a, b) / ein;
}

std::vector<ScanPoint> decay_scan(const PulseSpec& pulse, const SpectralProfile& profile,
                                  double factor, const std::vector<double>& switch_times,
                                  const SimGrid& grid) {
    if (switch_times.empty())
        throw std::invalid_argument("decay_scan: no switch times given");
    for (double ts : switch_times)
        if (!(ts > 0.0))
            throw std::invalid_argument("decay_scan: switch times must be > 0");

    const FieldTrace input = make_pulse(pulse, grid);

    StarkSchedule base_schedule;
    base_schedule.broadening_factor = factor;
    base_schedule.switch_time = 1.0; // fixed polarity within any practical window
    const FieldTrace baseline = run_once(input, profile, base_schedule, grid, false);

    std::vector<ScanPoint> points(switch_times.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

    auto worker = [&](std::size_t idx) {
        StarkSchedule s = base_schedule;
        s.switch_time = switch_times[idx];
        FieldTrace echo = run_once(input, profile, s, grid, true);
        for (std::size_t i = 0; i < echo.samples.size(); ++i)
            echo.samples[i] -= baseline.samples[i];
        points[idx].storage_time = 2.0 * s.switch_time;
        points[idx].efficiency = echo_efficiency(echo, input, s);
    };
    // static partition over the available cores
    std::vector<std::future<void>> futures;
    for (unsigned c = 0; c < hw; ++c) {
        futures.push_back(std::async(std::launch::async, [&, c]() {
            for (std::size_t i = c; i < switch_times.size(); i += hw)
                worker(i);
        }));
    }
    for (auto& f : futures)
        f.get();
    return points;
}

} // namespace cribsim
