#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "devent/adam.hpp"

namespace devent {

/// Raised when a training loss stops being finite.
class TrainingDivergedError : public std::runtime_error {
public:
    explicit TrainingDivergedError(const std::string& what) : std::runtime_error(what) {}
};

struct TrainOptions {
    AdamConfig adam;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 500;
    std::size_t patience = 10;     // epochs without min_delta improvement before stopping
    double min_delta = 1e-4;
    double val_fraction = 0.1;     // 0 disables the holdout; stopping then watches training loss
    std::uint64_t seed = 0;
};

struct CurvePoint {
    std::size_t epoch = 0;  // 0 is the pre-training evaluation
    double loss = 0.0;
    double accuracy = 0.0;  // unused (0) for reconstruction training
};

/// Plateau detector over a monitored loss.
class EarlyStopper {
public:
    EarlyStopper(std::size_t patience, double min_delta)
        : patience_(patience), min_delta_(min_delta) {}

    /// Feed the epoch's monitored loss; returns true when training should stop.
    bool should_stop(double loss) {
        if (loss < best_ - min_delta_) {
            best_ = loss;
            stale_ = 0;
            return false;
        }
        return ++stale_ >= patience_;
    }

    double best() const { return best_; }

private:
    std::size_t patience_;
    double min_delta_;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t stale_ = 0;
};

/// Deterministic holdout split of example indices: the tail of a seeded
/// shuffle becomes the validation set (at least one element when enabled).
inline void holdout_split(std::size_t n, double val_fraction, std::uint64_t seed,
                          std::vector<std::size_t>& train_idx, std::vector<std::size_t>& val_idx) {
    train_idx.clear();
    val_idx.clear();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(mix_seed(seed, "holdout"));
    rng.shuffle(order.begin(), order.end());
    std::size_t val_count = 0;
    if (val_fraction > 0.0 && n > 1) {
        val_count = std::max<std::size_t>(1, static_cast<std::size_t>(val_fraction * static_cast<double>(n)));
        if (val_count >= n) val_count = n - 1;
    }
    for (std::size_t i = 0; i < n - val_count; ++i) train_idx.push_back(order[i]);
    for (std::size_t i = n - val_count; i < n; ++i) val_idx.push_back(order[i]);
}

}  // namespace devent
