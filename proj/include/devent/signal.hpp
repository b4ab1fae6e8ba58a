#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "devent/random.hpp"
#include "devent/tensor.hpp"

namespace devent {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class EventCategory : std::uint8_t { AA = 0, HB = 1, HL = 2, HR = 3, RD = 4 };

inline constexpr std::size_t kNumCategories = 5;
inline constexpr std::size_t kNumAxes = 3;  // latitudinal, altitudinal, longitudinal
inline constexpr double kDefaultSampleRateHz = 25.0;
inline constexpr double kDefaultWindowMs = 600.0;
inline constexpr double kDefaultOverlap = 0.5;

inline constexpr std::array<EventCategory, kNumCategories> kAllCategories = {
    EventCategory::AA, EventCategory::HB, EventCategory::HL, EventCategory::HR, EventCategory::RD};

inline const char* to_string(EventCategory c) {
    switch (c) {
        case EventCategory::AA: return "AA";
        case EventCategory::HB: return "HB";
        case EventCategory::HL: return "HL";
        case EventCategory::HR: return "HR";
        case EventCategory::RD: return "RD";
    }
    throw std::invalid_argument("to_string: bad EventCategory");
}

inline EventCategory category_from_string(std::string_view s) {
    for (EventCategory c : kAllCategories) {
        if (s == to_string(c)) return c;
    }
    throw std::invalid_argument("category_from_string: unknown category '" + std::string(s) + "'");
}

/// One labeled capture: 3-axis acceleration samples at a fixed rate.
struct SessionRecording {
    std::vector<std::array<double, kNumAxes>> samples;
    double sample_rate_hz = kDefaultSampleRateHz;
    EventCategory label = EventCategory::RD;
    std::string session_id;

    double duration_ms() const {
        return 1000.0 * static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

struct WindowOrigin {
    std::string session_id;
    std::size_t start = 0;
    bool synthetic = false;
};

/// Fixed-length slice of a session: values are {3, W}, axis-major.
struct SignalWindow {
    Tensor values;
    EventCategory label = EventCategory::RD;
    WindowOrigin origin;

    std::size_t width() const { return values.shape.empty() ? 0 : values.shape[1]; }
};

struct WindowedDataset {
    std::vector<SignalWindow> windows;
    std::uint64_t seed = 0;  // provenance of whatever produced this set

    std::size_t size() const { return windows.size(); }
    bool empty() const { return windows.empty(); }

    std::size_t width() const { return windows.empty() ? 0 : windows.front().width(); }

    std::array<std::size_t, kNumCategories> category_counts() const {
        std::array<std::size_t, kNumCategories> counts{};
        for (const SignalWindow& w : windows) counts[static_cast<std::size_t>(w.label)]++;
        return counts;
    }
};

// ---------------------------------------------------------------------------
// Windowing
// ---------------------------------------------------------------------------

inline std::size_t window_samples(double window_ms = kDefaultWindowMs,
                                  double rate_hz = kDefaultSampleRateHz) {
    const double w = window_ms * rate_hz / 1000.0;
    auto n = static_cast<std::size_t>(std::floor(w + 1e-9));
    if (n == 0) throw std::invalid_argument("window_samples: window shorter than one sample");
    return n;
}

inline std::size_t hop_samples(std::size_t window, double overlap) {
    if (!(overlap >= 0.0 && overlap < 1.0)) throw std::invalid_argument("hop_samples: overlap must be in [0,1)");
    auto h = static_cast<std::size_t>(std::floor(static_cast<double>(window) * (1.0 - overlap) + 1e-9));
    return h == 0 ? 1 : h;
}

/// Thrown when a session cannot produce even one window. Distinct from an
/// empty result so callers can decide whether to skip or abort.
class SessionTooShortError : public std::invalid_argument {
public:
    explicit SessionTooShortError(const std::string& what) : std::invalid_argument(what) {}
};

/// Slide a fixed window over the session. Emits floor((N-W)/H)+1 windows,
/// all carrying the session label.
inline std::vector<SignalWindow> slice_session(const SessionRecording& session,
                                               double window_ms = kDefaultWindowMs,
                                               double overlap = kDefaultOverlap) {
    const std::size_t w = window_samples(window_ms, session.sample_rate_hz);
    const std::size_t h = hop_samples(w, overlap);
    const std::size_t n = session.samples.size();
    if (n < w) {
        throw SessionTooShortError("slice_session: session '" + session.session_id + "' has " +
                                   std::to_string(n) + " samples, needs " + std::to_string(w));
    }
    const std::size_t count = (n - w) / h + 1;
    std::vector<SignalWindow> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t start = k * h;
        SignalWindow win;
        win.values = Tensor({kNumAxes, w});
        for (std::size_t a = 0; a < kNumAxes; ++a) {
            for (std::size_t t = 0; t < w; ++t) win.values(a, t) = session.samples[start + t][a];
        }
        win.label = session.label;
        win.origin = {session.session_id, start, false};
        out.push_back(std::move(win));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Noise injection and augmentation input
// ---------------------------------------------------------------------------

/// Per-axis Gaussian perturbation; label and origin are preserved and the
/// result is a pure function of (window, sigma, seed).
inline SignalWindow inject_noise(const SignalWindow& window,
                                 const std::array<double, kNumAxes>& sigma, std::uint64_t seed) {
    for (double s : sigma) {
        if (s < 0.0) throw std::invalid_argument("inject_noise: negative sigma");
    }
    SignalWindow out = window;
    Rng rng(seed);
    const std::size_t w = window.width();
    for (std::size_t a = 0; a < kNumAxes; ++a) {
        for (std::size_t t = 0; t < w; ++t) out.values(a, t) += sigma[a] * rng.normal(0.0, 1.0);
    }
    return out;
}

inline SignalWindow inject_noise(const SignalWindow& window, double sigma, std::uint64_t seed) {
    return inject_noise(window, std::array<double, kNumAxes>{sigma, sigma, sigma}, seed);
}

/// The 10x duplication step: `copies` noise-injected variants of one window.
inline std::vector<SignalWindow> duplicate_with_noise(const SignalWindow& window,
                                                      std::size_t copies, double sigma,
                                                      std::uint64_t seed) {
    if (copies == 0) throw std::invalid_argument("duplicate_with_noise: copies must be >= 1");
    std::vector<SignalWindow> out;
    out.reserve(copies);
    for (std::size_t k = 0; k < copies; ++k) {
        out.push_back(inject_noise(window, sigma, mix_seed(seed, k)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

enum class SplitMode {
    window,   // shuffle individual windows (default; matches the reported protocol)
    session,  // keep all windows of a session on one side of the split
};

inline std::pair<WindowedDataset, WindowedDataset> split_train_test(
    const WindowedDataset& dataset, double train_fraction = 0.7, std::uint64_t seed = 0,
    SplitMode mode = SplitMode::window) {
    if (dataset.empty()) throw std::invalid_argument("split_train_test: empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split_train_test: train_fraction must be in (0,1)");
    }
    const std::size_t n = dataset.size();
    const auto train_count =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(seed, "split"));

    std::vector<bool> in_train(n, false);
    if (mode == SplitMode::window) {
        rng.shuffle(order.begin(), order.end());
        for (std::size_t i = 0; i < train_count; ++i) in_train[order[i]] = true;
    } else {
        // session granularity: walk shuffled sessions, filling train first
        std::vector<std::string> ids;
        for (const SignalWindow& w : dataset.windows) {
            if (std::find(ids.begin(), ids.end(), w.origin.session_id) == ids.end()) {
                ids.push_back(w.origin.session_id);
            }
        }
        rng.shuffle(ids.begin(), ids.end());
        std::size_t assigned = 0;
        for (const std::string& id : ids) {
            if (assigned >= train_count) break;
            for (std::size_t i = 0; i < n; ++i) {
                if (dataset.windows[i].origin.session_id == id) {
                    in_train[i] = true;
                    ++assigned;
                }
            }
        }
    }

    WindowedDataset train, test;
    train.seed = test.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        (in_train[i] ? train : test).windows.push_back(dataset.windows[i]);
    }
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Per-axis mean and standard deviation, computed on training data only.
struct AxisStats {
    std::array<double, kNumAxes> mean{};
    std::array<double, kNumAxes> stddev{1.0, 1.0, 1.0};
};

inline AxisStats compute_axis_stats(const std::vector<SignalWindow>& windows) {
    if (windows.empty()) throw std::invalid_argument("compute_axis_stats: empty input");
    AxisStats st;
    std::array<double, kNumAxes> sum{}, sumsq{};
    std::size_t count = 0;
    for (const SignalWindow& w : windows) {
        const std::size_t width = w.width();
        for (std::size_t a = 0; a < kNumAxes; ++a) {
            for (std::size_t t = 0; t < width; ++t) {
                const double v = w.values(a, t);
                sum[a] += v;
                sumsq[a] += v * v;
            }
        }
        count += width;
    }
    for (std::size_t a = 0; a < kNumAxes; ++a) {
        st.mean[a] = sum[a] / static_cast<double>(count);
        const double var = sumsq[a] / static_cast<double>(count) - st.mean[a] * st.mean[a];
        st.stddev[a] = var > 1e-24 ? std::sqrt(var) : 1.0;  // constant axis stays unscaled
    }
    return st;
}

inline SignalWindow normalize_window(const SignalWindow& w, const AxisStats& st) {
    SignalWindow out = w;
    const std::size_t width = w.width();
    for (std::size_t a = 0; a < kNumAxes; ++a) {
        for (std::size_t t = 0; t < width; ++t) {
            out.values(a, t) = (w.values(a, t) - st.mean[a]) / st.stddev[a];
        }
    }
    return out;
}

inline SignalWindow denormalize_window(const SignalWindow& w, const AxisStats& st) {
    SignalWindow out = w;
    const std::size_t width = w.width();
    for (std::size_t a = 0; a < kNumAxes; ++a) {
        for (std::size_t t = 0; t < width; ++t) {
            out.values(a, t) = w.values(a, t) * st.stddev[a] + st.mean[a];
        }
    }
    return out;
}

inline void normalize_in_place(std::vector<SignalWindow>& windows, const AxisStats& st) {
    for (SignalWindow& w : windows) w = normalize_window(w, st);
}

// ---------------------------------------------------------------------------
// File formats
//
// Session file: header `label=<AA|HB|HL|HR|RD> rate_hz=<r> id=<string>`,
// then one `ax ay az` line per sample. A manifest lists one session file
// path per line, relative to the manifest's directory.
//
// Window files reuse the same layout with extra header tokens
// (`start=<n>`, and `origin=synthetic` for generated windows); each window
// is a header line followed by exactly W sample lines.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::string header_value(const std::string& header, const std::string& key) {
    std::istringstream is(header);
    std::string token;
    while (is >> token) {
        if (token.rfind(key + "=", 0) == 0) return token.substr(key.size() + 1);
    }
    return {};
}

}  // namespace detail

inline void write_session_file(const SessionRecording& session, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_session_file: cannot open " + path.string());
    out << "label=" << to_string(session.label) << " rate_hz=" << detail::format_double(session.sample_rate_hz)
        << " id=" << session.session_id << "\n";
    for (const auto& s : session.samples) {
        out << detail::format_double(s[0]) << ' ' << detail::format_double(s[1]) << ' '
            << detail::format_double(s[2]) << "\n";
    }
    if (!out) throw std::runtime_error("write_session_file: write failed for " + path.string());
}

inline SessionRecording read_session_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_session_file: cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("read_session_file: empty file " + path.string());
    SessionRecording session;
    const std::string label = detail::header_value(header, "label");
    const std::string rate = detail::header_value(header, "rate_hz");
    session.session_id = detail::header_value(header, "id");
    if (label.empty() || rate.empty() || session.session_id.empty()) {
        throw std::runtime_error("read_session_file: malformed header in " + path.string());
    }
    session.label = category_from_string(label);
    session.sample_rate_hz = std::stod(rate);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::array<double, kNumAxes> s{};
        if (!(is >> s[0] >> s[1] >> s[2])) {
            throw std::runtime_error("read_session_file: malformed sample line in " + path.string());
        }
        session.samples.push_back(s);
    }
    return session;
}

inline void write_manifest(const std::vector<std::string>& relative_paths,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path.string());
    for (const std::string& p : relative_paths) out << p << "\n";
    if (!out) throw std::runtime_error("write_manifest: write failed for " + path.string());
}

inline std::vector<SessionRecording> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_manifest: cannot open " + path.string());
    const std::filesystem::path base = path.parent_path();
    std::vector<SessionRecording> sessions;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        sessions.push_back(read_session_file(base / line));
    }
    return sessions;
}

inline void write_windows_file(const std::vector<SignalWindow>& windows,
                               const std::filesystem::path& path,
                               double rate_hz = kDefaultSampleRateHz) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_windows_file: cannot open " + path.string());
    for (const SignalWindow& w : windows) {
        out << "label=" << to_string(w.label) << " rate_hz=" << detail::format_double(rate_hz)
            << " id=" << w.origin.session_id << " start=" << w.origin.start;
        if (w.origin.synthetic) out << " origin=synthetic";
        out << "\n";
        const std::size_t width = w.width();
        for (std::size_t t = 0; t < width; ++t) {
            out << detail::format_double(w.values(0, t)) << ' ' << detail::format_double(w.values(1, t))
                << ' ' << detail::format_double(w.values(2, t)) << "\n";
        }
    }
    if (!out) throw std::runtime_error("write_windows_file: write failed for " + path.string());
}

inline std::vector<SignalWindow> read_windows_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_windows_file: cannot open " + path.string());
    std::vector<SignalWindow> windows;
    std::string line;
    std::vector<std::array<double, kNumAxes>> samples;
    std::string header;
    auto flush = [&]() {
        if (header.empty()) return;
        if (samples.empty()) throw std::runtime_error("read_windows_file: window without samples in " + path.string());
        SignalWindow w;
        w.label = category_from_string(detail::header_value(header, "label"));
        w.origin.session_id = detail::header_value(header, "id");
        const std::string start = detail::header_value(header, "start");
        w.origin.start = start.empty() ? 0 : std::stoull(start);
        w.origin.synthetic = detail::header_value(header, "origin") == "synthetic";
        w.values = Tensor({kNumAxes, samples.size()});
        for (std::size_t t = 0; t < samples.size(); ++t) {
            for (std::size_t a = 0; a < kNumAxes; ++a) w.values(a, t) = samples[t][a];
        }
        windows.push_back(std::move(w));
        samples.clear();
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("label=", 0) == 0) {
            flush();
            header = line;
        } else {
            std::istringstream is(line);
            std::array<double, kNumAxes> s{};
            if (!(is >> s[0] >> s[1] >> s[2])) {
                throw std::runtime_error("read_windows_file: malformed sample line in " + path.string());
            }
            samples.push_back(s);
        }
    }
    flush();
    return windows;
}

}  // namespace devent
