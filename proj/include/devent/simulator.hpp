#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "devent/random.hpp"
#include "devent/signal.hpp"

namespace devent {

/// Shape of one synthetic maneuver: a half-sine pulse on a dominant axis on
/// top of a Gaussian noise floor. Regular driving has no pulse.
struct EventTemplate {
    int dominant_axis = -1;  // 0 latitudinal, 2 longitudinal, -1 none
    double polarity = 1.0;
    double peak_amplitude_min = 2.5;  // m/s^2
    double peak_amplitude_max = 4.0;
    double pulse_ms_min = 1300.0;
    double pulse_ms_max = 3200.0;
    // fraction of the session the pulse may occupy; keeps most windows on the pulse
    double coverage_min = 0.62;
    double coverage_max = 0.94;
    double noise_sigma = 0.15;  // baseline floor, m/s^2
    // baseline draws are clipped at this many sigmas so the floor stays bounded
    double noise_clip_sigmas = 2.95;

    void validate() const {
        if (!(peak_amplitude_min > 0.0 && peak_amplitude_max >= peak_amplitude_min)) {
            throw std::invalid_argument("EventTemplate: bad amplitude range");
        }
        if (!(pulse_ms_min > 0.0 && pulse_ms_max >= pulse_ms_min)) {
            throw std::invalid_argument("EventTemplate: bad pulse duration range");
        }
        if (!(noise_sigma >= 0.0)) throw std::invalid_argument("EventTemplate: negative noise sigma");
    }
};

inline EventTemplate default_template(EventCategory category) {
    EventTemplate t;
    switch (category) {
        case EventCategory::AA:
            t.dominant_axis = 2;
            t.polarity = 1.0;
            break;
        case EventCategory::HB:
            t.dominant_axis = 2;
            t.polarity = -1.0;
            break;
        case EventCategory::HL:
            t.dominant_axis = 0;
            t.polarity = 1.0;
            t.peak_amplitude_min = 2.0;
            t.peak_amplitude_max = 3.5;
            break;
        case EventCategory::HR:
            t.dominant_axis = 0;
            t.polarity = -1.0;
            t.peak_amplitude_min = 2.0;
            t.peak_amplitude_max = 3.5;
            break;
        case EventCategory::RD:
            t.dominant_axis = -1;
            break;
    }
    return t;
}

struct SimulatorConfig {
    // indexed by EventCategory: AA, HB, HL, HR, RD
    std::array<std::size_t, kNumCategories> session_counts = {12, 13, 16, 15, 14};
    double duration_ms_min = 2000.0;
    double duration_ms_max = 3600.0;
    double sample_rate_hz = kDefaultSampleRateHz;
    std::uint64_t master_seed = 0;
    /// Pulse-amplitude-to-noise ratio. 0 keeps the per-template amplitude
    /// defaults; > 0 rescales every event amplitude to difficulty * noise
    /// sigma (within a +-20% band), which is the separability dial.
    double difficulty = 0.0;
    std::array<EventTemplate, kNumCategories> templates = {
        default_template(EventCategory::AA), default_template(EventCategory::HB),
        default_template(EventCategory::HL), default_template(EventCategory::HR),
        default_template(EventCategory::RD)};

    void validate() const {
        if (!(duration_ms_min > 0.0 && duration_ms_max >= duration_ms_min)) {
            throw std::invalid_argument("SimulatorConfig: bad duration range");
        }
        if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("SimulatorConfig: bad sample rate");
        if (difficulty < 0.0) throw std::invalid_argument("SimulatorConfig: negative difficulty");
        for (const EventTemplate& t : templates) t.validate();
    }

    EventTemplate effective_template(EventCategory category) const {
        EventTemplate t = templates[static_cast<std::size_t>(category)];
        if (difficulty > 0.0 && t.dominant_axis >= 0) {
            const double mid = difficulty * t.noise_sigma;
            t.peak_amplitude_min = 0.8 * mid;
            t.peak_amplitude_max = 1.2 * mid;
        }
        return t;
    }
};

inline SessionRecording generate_session(EventCategory category, double duration_ms,
                                         std::uint64_t seed, const EventTemplate& tmpl,
                                         double sample_rate_hz = kDefaultSampleRateHz) {
    tmpl.validate();
    const auto n = static_cast<std::size_t>(std::floor(duration_ms * sample_rate_hz / 1000.0 + 1e-9));
    if (n < window_samples(kDefaultWindowMs, sample_rate_hz)) {
        throw std::invalid_argument("generate_session: duration below one window");
    }
    SessionRecording session;
    session.sample_rate_hz = sample_rate_hz;
    session.label = category;
    session.samples.assign(n, {0.0, 0.0, 0.0});

    Rng rng(seed);
    // clipped baseline noise on every axis
    const double clip = tmpl.noise_clip_sigmas * tmpl.noise_sigma;
    for (auto& s : session.samples) {
        for (std::size_t a = 0; a < kNumAxes; ++a) {
            double v = rng.normal(0.0, tmpl.noise_sigma);
            s[a] = std::clamp(v, -clip, clip);
        }
    }

    if (tmpl.dominant_axis >= 0) {
        const auto axis = static_cast<std::size_t>(tmpl.dominant_axis);
        const double amplitude = rng.uniform(tmpl.peak_amplitude_min, tmpl.peak_amplitude_max);
        double pulse_ms = rng.uniform(tmpl.pulse_ms_min, tmpl.pulse_ms_max);
        pulse_ms = std::clamp(pulse_ms, tmpl.coverage_min * duration_ms, tmpl.coverage_max * duration_ms);
        pulse_ms = std::min(pulse_ms, duration_ms);
        const double onset_ms = rng.uniform(0.0, duration_ms - pulse_ms);
        const double dt_ms = 1000.0 / sample_rate_hz;
        for (std::size_t i = 0; i < n; ++i) {
            const double t_ms = static_cast<double>(i) * dt_ms;
            if (t_ms >= onset_ms && t_ms <= onset_ms + pulse_ms) {
                session.samples[i][axis] += amplitude * std::sin(M_PI * (t_ms - onset_ms) / pulse_ms);
            }
        }
        // polarity flips the whole dominant axis, noise included, so mirrored
        // categories (HL/HR, AA/HB) are exact sign images under the same seed
        if (tmpl.polarity < 0.0) {
            for (auto& s : session.samples) s[axis] = -s[axis];
        }
    }
    return session;
}

/// Build the full labeled dataset: exact per-category counts, durations
/// uniform in the configured range, bit-identical for a given config.
inline std::vector<SessionRecording> generate_dataset(const SimulatorConfig& config) {
    config.validate();
    std::vector<SessionRecording> sessions;
    for (EventCategory category : kAllCategories) {
        const std::size_t count = config.session_counts[static_cast<std::size_t>(category)];
        const EventTemplate tmpl = config.effective_template(category);
        for (std::size_t k = 0; k < count; ++k) {
            std::string id = std::string("sim-") + to_string(category) + "-" + std::to_string(k);
            const std::uint64_t session_seed = mix_seed(config.master_seed, id);
            Rng dur_rng(mix_seed(session_seed, "duration"));
            const double duration_ms = std::floor(dur_rng.uniform(config.duration_ms_min, config.duration_ms_max));
            SessionRecording s = generate_session(category, duration_ms, session_seed, tmpl,
                                                  config.sample_rate_hz);
            s.session_id = std::move(id);
            sessions.push_back(std::move(s));
        }
    }
    return sessions;
}

}  // namespace devent
