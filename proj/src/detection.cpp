#include "cribsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cribsim {

namespace {

std::uint64_t next_u64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double next_unit(std::uint64_t& state) {
    return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

long long poisson_sample(std::uint64_t& state, double mu) {
    if (!(mu >= 0.0))
        throw std::invalid_argument("poisson_sample: mean must be >= 0");
    if (mu == 0.0)
        return 0;
    if (mu < 30.0) {
        // inversion by multiplication of uniforms
        const double limit = std::exp(-mu);
        long long k = 0;
        double p = next_unit(state);
        while (p > limit) {
            ++k;
            p *= next_unit(state);
        }
        return k;
    }
    // transformed rejection with squeeze (PTRS), valid for mu >= 10
    const double slam = std::sqrt(mu);
    const double loglam = std::log(mu);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = next_unit(state) - 0.5;
        const double v = next_unit(state);
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            kf * loglam - mu - std::lgamma(kf + 1.0))
            return static_cast<long long>(kf);
    }
}

void DetectionModel::validate() const {
    if (!(transmission >= 0.0 && transmission <= 1.0))
        throw std::invalid_argument("DetectionModel: transmission must be in [0,1]");
    if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0))
        throw std::invalid_argument("DetectionModel: detector_efficiency must be in [0,1]");
    if (!(dark_rate >= 0.0) || !(noise_floor_rate >= 0.0))
        throw std::invalid_argument("DetectionModel: rates must be >= 0");
    if (trials < 1)
        throw std::invalid_argument("DetectionModel: trials must be >= 1");
    if (!(bin_width > 0.0))
        throw std::invalid_argument("DetectionModel: bin_width must be > 0");
}

namespace {

std::size_t bin_count(const FieldTrace& trace, const DetectionModel& model) {
    if (trace.samples.empty() || !(trace.dt > 0.0))
        throw std::invalid_argument("expected_counts_per_bin: empty trace");
    if (model.bin_width < trace.dt)
        throw std::invalid_argument("expected_counts_per_bin: bin_width must be >= trace dt");
    const double span = static_cast<double>(trace.samples.size()) * trace.dt;
    const auto n = static_cast<std::size_t>(span / model.bin_width + 1e-9);
    if (n < 1)
        throw std::invalid_argument("expected_counts_per_bin: trace shorter than one bin");
    return n;
}

} // namespace

std::vector<double> expected_counts_per_bin(const FieldTrace& trace, const DetectionModel& model) {
    model.validate();
    const std::size_t nbins = bin_count(trace, model);
    const double eff = model.transmission * model.detector_efficiency;
    const double background = (model.dark_rate + model.noise_floor_rate) * model.bin_width;

    std::vector<double> mu(nbins, background);
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const double tc = (static_cast<double>(i) + 0.5) * trace.dt;
        const auto b = static_cast<std::size_t>(tc / model.bin_width);
        if (b < nbins)
            mu[b] += std::norm(trace.samples[i]) * trace.dt * eff;
    }
    return mu;
}

Histogram simulate_histogram(const FieldTrace& trace, const DetectionModel& model) {
    const std::vector<double> mu = expected_counts_per_bin(trace, model);

    Histogram hist;
    hist.bin_start = trace.t0;
    hist.bin_width = model.bin_width;
    hist.trials = model.trials;
    hist.counts.assign(mu.size(), 0);

    const long long nblocks = (model.trials + kTrialBlock - 1) / kTrialBlock;
    for (long long blk = 0; blk < nblocks; ++blk) {
        const long long in_block = std::min(kTrialBlock, model.trials - blk * kTrialBlock);
        std::uint64_t state =
            splitmix64(model.rng_seed ^ splitmix64(static_cast<std::uint64_t>(blk) + 0x51ED2701ULL));
        for (std::size_t b = 0; b < mu.size(); ++b)
            hist.counts[b] += poisson_sample(state, static_cast<double>(in_block) * mu[b]);
    }
    return hist;
}

namespace {

std::pair<std::size_t, std::size_t> window_bins(const Histogram& hist, const Window& w) {
    const std::size_t n = hist.counts.size();
    std::size_t lo = n, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double center = hist.bin_start + (static_cast<double>(i) + 0.5) * hist.bin_width;
        if (center >= w.start && center <= w.end) {
            lo = std::min(lo, i);
            hi = std::max(hi, i + 1);
        }
    }
    if (lo >= hi)
        return {0, 0};
    return {lo, hi};
}

} // namespace

double snr(const Histogram& hist, const Window& signal_window, const Window& noise_window) {
    const auto [slo, shi] = window_bins(hist, signal_window);
    const auto [nlo, nhi] = window_bins(hist, noise_window);
    if (nhi == nlo)
        throw std::invalid_argument("snr: noise window contains no bins");
    if (shi == slo)
        throw std::invalid_argument("snr: signal window contains no bins");
    if (std::max(slo, nlo) < std::min(shi, nhi))
        throw std::invalid_argument("snr: windows overlap");

    double s = 0.0, n = 0.0;
    for (std::size_t i = slo; i < shi; ++i)
        s += static_cast<double>(hist.counts[i]);
    for (std::size_t i = nlo; i < nhi; ++i)
        n += static_cast<double>(hist.counts[i]);

    const double scale = static_cast<double>(shi - slo) / static_cast<double>(nhi - nlo);
    const double noise_estimate = n * scale;
    if (noise_estimate <= 0.0)
        return std::numeric_limits<double>::infinity();
    return (s - noise_estimate) / noise_estimate;
}

std::vector<double> subtract_dark_counts(const Histogram& hist, const DetectionModel& model) {
    model.validate();
    const double dark = model.dark_rate * hist.bin_width * static_cast<double>(hist.trials);
    std::vector<double> out(hist.counts.size());
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        out[i] = static_cast<double>(hist.counts[i]) - dark;
    return out;
}

double calibrate_noise_floor(double echo_counts_per_trial, double signal_window_duration,
                             double target_snr) {
    if (!(echo_counts_per_trial > 0.0) || !(signal_window_duration > 0.0) || !(target_snr > 0.0))
        throw std::invalid_argument("calibrate_noise_floor: arguments must be > 0");
    return echo_counts_per_trial / (target_snr * signal_window_duration);
}

LinearityResult linearity_scan(const std::vector<double>& nbar_values,
                               const LinearityScenario& scenario) {
    scenario.model.validate();
    for (double nb : nbar_values)
        if (!(nb > 0.0))
            throw std::invalid_argument("linearity_scan: nbar values must be > 0");

    LinearityResult result;
    result.rows.reserve(nbar_values.size());

    const double unit_norm = scenario.unit_trace.photon_norm();

    for (std::size_t idx = 0; idx < nbar_values.size(); ++idx) {
        const double nbar = nbar_values[idx];
        FieldTrace scaled = scenario.unit_trace;
        const double amp = unit_norm > 0.0 ? std::sqrt(nbar / unit_norm) : 0.0;
        for (auto& e : scaled.samples)
            e *= amp;

        DetectionModel model = scenario.model;
        model.rng_seed = splitmix64(scenario.model.rng_seed ^ splitmix64(idx + 0xABCD1234ULL));
        const Histogram hist = simulate_histogram(scaled, model);
        const std::vector<double> sub = subtract_dark_counts(hist, model);
        const std::vector<double> mu = expected_counts_per_bin(scaled, model);

        const auto [slo, shi] = window_bins(hist, scenario.signal_window);
        const auto [nlo, nhi] = window_bins(hist, scenario.noise_window);
        if (shi == slo || nhi == nlo)
            throw std::invalid_argument("linearity_scan: empty analysis window");

        double s = 0.0, n = 0.0, mu_sig = 0.0;
        for (std::size_t i = slo; i < shi; ++i) {
            s += sub[i];
            mu_sig += mu[i];
        }
        for (std::size_t i = nlo; i < nhi; ++i)
            n += sub[i];

        const double nsig = static_cast<double>(shi - slo);
        const double floor_total =
            model.noise_floor_rate * model.bin_width * static_cast<double>(model.trials) * nsig;
        const double bg_expected =
            (model.dark_rate + model.noise_floor_rate) * model.bin_width * nsig;

        LinearityResult::Row row;
        row.nbar = nbar;
        row.echo_counts = s - floor_total;
        row.expected_counts = (mu_sig - bg_expected) * static_cast<double>(model.trials);
        const double noise_estimate = n * nsig / static_cast<double>(nhi - nlo);
        if (noise_estimate <= 0.0) {
            row.snr = std::numeric_limits<double>::infinity();
            result.snr_infinite = true;
        } else {
            row.snr = (s - noise_estimate) / noise_estimate;
        }
        result.rows.push_back(row);
    }

    // log-log slopes
    if (nbar_values.size() >= 2) {
        auto slope_of = [&](auto value_of) {
            double mx = 0, my = 0;
            std::size_t n = 0;
            for (const auto& r : result.rows) {
                const double v = value_of(r);
                if (v > 0.0 && std::isfinite(v)) {
                    mx += std::log(r.nbar);
                    my += std::log(v);
                    ++n;
                }
            }
            if (n < 2)
                return std::pair<double, bool>{0.0, false};
            mx /= static_cast<double>(n);
            my /= static_cast<double>(n);
            double sxx = 0, sxy = 0;
            for (const auto& r : result.rows) {
                const double v = value_of(r);
                if (v > 0.0 && std::isfinite(v)) {
                    const double dx = std::log(r.nbar) - mx;
                    sxx += dx * dx;
                    sxy += dx * (std::log(v) - my);
                }
            }
            if (!(sxx > 0.0))
                return std::pair<double, bool>{0.0, false};
            return std::pair<double, bool>{sxy / sxx, true};
        };
        const auto [cs, cok] = slope_of([](const LinearityResult::Row& r) { return r.echo_counts; });
        const auto [ss, sok] = slope_of([](const LinearityResult::Row& r) { return r.snr; });
        result.counts_slope = cs;
        result.snr_slope = ss;
        result.slopes_defined = cok && sok;
        if (result.snr_infinite)
            result.slopes_defined = cok; // SNR slope meaningless without noise
    }
    return result;
}

} // namespace cribsim
