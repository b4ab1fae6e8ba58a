#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "devent/nn.hpp"
#include "devent/signal.hpp"
#include "devent/training.hpp"

namespace devent {

/// Encoder output: the final hidden state of the last (narrowest) layer.
struct LatentVector {
    Vec values;
    WindowOrigin origin;
    std::uint64_t noise_seed = 0;
    EventCategory label = EventCategory::RD;
};

inline Seq window_to_seq(const SignalWindow& w) {
    const std::size_t width = w.width();
    Seq xs(width, Vec(kNumAxes));
    for (std::size_t t = 0; t < width; ++t) {
        for (std::size_t a = 0; a < kNumAxes; ++a) xs[t][a] = w.values(a, t);
    }
    return xs;
}

/// Stacked LSTM with strictly decreasing hidden widths; the last width is
/// the latent width.
class LstmEncoder {
public:
    LstmEncoder() = default;

    LstmEncoder(std::size_t input_width, const std::vector<std::size_t>& widths) {
        if (widths.empty()) throw std::invalid_argument("LstmEncoder: no layer widths");
        for (std::size_t i = 1; i < widths.size(); ++i) {
            if (widths[i] >= widths[i - 1]) {
                throw std::invalid_argument("LstmEncoder: widths must be strictly decreasing");
            }
        }
        std::size_t in_w = input_width;
        for (std::size_t w : widths) {
            layers.emplace_back(in_w, w);
            in_w = w;
        }
    }

    void init(Rng& rng) {
        for (Lstm& l : layers) l.init(rng);
    }

    std::size_t input_width() const { return layers.front().in_width(); }
    std::size_t latent_width() const { return layers.back().hidden_width(); }

    std::vector<std::size_t> widths() const {
        std::vector<std::size_t> out;
        for (const Lstm& l : layers) out.push_back(l.hidden_width());
        return out;
    }

    /// Consume the whole sequence; the latent is the last layer's final h.
    Vec encode(const Seq& xs) {
        Seq h = xs;
        for (Lstm& l : layers) h = l.forward(h);
        return h.back();
    }

    /// Backprop a gradient on the latent through the stack.
    void backward(const Vec& dlatent, std::size_t steps) {
        Seq dh(steps, Vec(layers.back().hidden_width(), 0.0));
        dh.back() = dlatent;
        for (std::size_t li = layers.size(); li-- > 0;) {
            Seq dx = layers[li].backward(dh);
            dh = std::move(dx);
        }
    }

    void collect(ParameterSet& set, const std::string& prefix) {
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const std::string base = prefix + ".lstm" + std::to_string(i);
            set.add(base + ".Wx", layers[i].Wx);
            set.add(base + ".Wh", layers[i].Wh);
            set.add(base + ".b", layers[i].b);
        }
    }

    std::vector<Lstm> layers;
};

/// Mirror of the encoder: increasing widths, latent seeds the first layer's
/// hidden state, inputs are zero vectors, and a shared linear projection
/// maps each step back to the 3 axes.
class LstmDecoder {
public:
    LstmDecoder() = default;

    LstmDecoder(std::size_t latent_width, const std::vector<std::size_t>& widths,
                std::size_t out_axes = kNumAxes) {
        if (widths.empty()) throw std::invalid_argument("LstmDecoder: no layer widths");
        if (widths.front() != latent_width) {
            throw std::invalid_argument("LstmDecoder: first width must equal latent width");
        }
        for (std::size_t i = 1; i < widths.size(); ++i) {
            if (widths[i] <= widths[i - 1]) {
                throw std::invalid_argument("LstmDecoder: widths must be strictly increasing");
            }
        }
        std::size_t in_w = latent_width;  // zero input vector of latent width
        for (std::size_t w : widths) {
            layers.emplace_back(in_w, w);
            in_w = w;
        }
        proj = Dense(widths.back(), out_axes);
    }

    void init(Rng& rng) {
        for (Lstm& l : layers) l.init(rng);
        proj.init(rng);
    }

    std::size_t latent_width() const { return layers.front().hidden_width(); }
    std::size_t out_axes() const { return proj.out_width(); }

    std::vector<std::size_t> widths() const {
        std::vector<std::size_t> out;
        for (const Lstm& l : layers) out.push_back(l.hidden_width());
        return out;
    }

    /// Roll the stack for `steps` timesteps and project to axis values.
    Tensor decode(const Vec& latent, std::size_t steps) {
        if (latent.size() != latent_width()) {
            throw std::invalid_argument("LstmDecoder: latent width mismatch");
        }
        Seq zeros(steps, Vec(layers.front().in_width(), 0.0));
        Seq h = layers.front().forward(zeros, &latent);
        for (std::size_t li = 1; li < layers.size(); ++li) h = layers[li].forward(h);
        cache_h_ = h;
        Tensor out({out_axes(), steps});
        const std::size_t hw = layers.back().hidden_width();
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t a = 0; a < out_axes(); ++a) {
                double acc = proj.b.value[a];
                const double* row = proj.W.value.values.data() + a * hw;
                for (std::size_t u = 0; u < hw; ++u) acc += row[u] * h[t][u];
                out(a, t) = acc;
            }
        }
        return out;
    }

    /// Backprop a gradient on the decoded window; returns the latent gradient.
    Vec backward(const Tensor& d_out) {
        const std::size_t steps = cache_h_.size();
        const std::size_t hw = layers.back().hidden_width();
        Seq dh(steps, Vec(hw, 0.0));
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t a = 0; a < out_axes(); ++a) {
                const double g = d_out(a, t);
                proj.b.grad[a] += g;
                double* wg = proj.W.grad.values.data() + a * hw;
                const double* wv = proj.W.value.values.data() + a * hw;
                for (std::size_t u = 0; u < hw; ++u) {
                    wg[u] += g * cache_h_[t][u];
                    dh[t][u] += g * wv[u];
                }
            }
        }
        for (std::size_t li = layers.size(); li-- > 1;) {
            Seq dx = layers[li].backward(dh);
            dh = std::move(dx);
        }
        Vec dh0;
        layers.front().backward(dh, &dh0);
        return dh0;
    }

    void collect(ParameterSet& set, const std::string& prefix) {
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const std::string base = prefix + ".lstm" + std::to_string(i);
            set.add(base + ".Wx", layers[i].Wx);
            set.add(base + ".Wh", layers[i].Wh);
            set.add(base + ".b", layers[i].b);
        }
        set.add(prefix + ".proj.W", proj.W);
        set.add(prefix + ".proj.b", proj.b);
    }

    std::vector<Lstm> layers;
    Dense proj;

private:
    Seq cache_h_;
};

/// Denoising recurrent auto-encoder over fixed-width windows.
struct Autoencoder {
    LstmEncoder encoder;
    LstmDecoder decoder;
    std::size_t window_width = 0;
    // per-axis noise applied during training; augmentation reuses it
    std::array<double, kNumAxes> noise_sigma{};

    Autoencoder() = default;

    Autoencoder(std::size_t window_width_, const std::vector<std::size_t>& encoder_widths)
        : encoder(kNumAxes, encoder_widths),
          decoder(encoder_widths.back(),
                  std::vector<std::size_t>(encoder_widths.rbegin(), encoder_widths.rend())),
          window_width(window_width_) {}

    void init(Rng& rng) {
        encoder.init(rng);
        decoder.init(rng);
    }

    LatentVector encode(const SignalWindow& window) {
        if (window.width() != window_width) {
            throw std::invalid_argument("Autoencoder::encode: window width mismatch");
        }
        LatentVector lv;
        lv.values = encoder.encode(window_to_seq(window));
        lv.origin = window.origin;
        lv.label = window.label;
        return lv;
    }

    Tensor decode(const LatentVector& latent, std::size_t steps = 0) {
        if (latent.values.size() != decoder.latent_width()) {
            throw std::invalid_argument("Autoencoder::decode: latent width mismatch");
        }
        return decoder.decode(latent.values, steps == 0 ? window_width : steps);
    }

    ParameterSet parameters() {
        ParameterSet set;
        encoder.collect(set, "encoder");
        decoder.collect(set, "decoder");
        return set;
    }
};

struct AeTrainOptions {
    std::vector<std::size_t> encoder_widths = {64, 32, 16};
    std::size_t copies = 10;    // noisy duplicates per source window
    double noise_scale = 1.0;   // injected sigma = noise_scale * per-axis stddev
    TrainOptions train;
};

struct AeTrainResult {
    Autoencoder model;
    std::vector<CurvePoint> curve;     // training loss per epoch (mean per window)
    std::vector<double> val_curve;     // held-out loss per epoch, [0] is pre-training
    double initial_val_loss = 0.0;
    double final_val_loss = 0.0;
    std::size_t epochs_run = 0;
};

namespace detail {

struct AePair {
    Seq noisy;
    const Tensor* clean;
};

inline double ae_eval_loss(Autoencoder& ae, const std::vector<AePair>& pairs) {
    double total = 0.0;
    for (const AePair& p : pairs) {
        Vec latent = ae.encoder.encode(p.noisy);
        Tensor decoded = ae.decoder.decode(latent, p.noisy.size());
        total += reconstruction_loss(*p.clean, decoded);
    }
    return total / static_cast<double>(pairs.size());
}

}  // namespace detail

/// Self-supervised denoising training: every source window is duplicated
/// `copies` times with Gaussian noise and the network learns to map the
/// noisy copy back to its clean original.
inline AeTrainResult train_autoencoder(const std::vector<SignalWindow>& clean_windows,
                                       const AeTrainOptions& options) {
    if (clean_windows.empty()) throw std::invalid_argument("train_autoencoder: empty training set");
    options.train.adam.validate();
    const std::size_t width = clean_windows.front().width();
    for (const SignalWindow& w : clean_windows) {
        if (w.width() != width) throw std::invalid_argument("train_autoencoder: mixed window widths");
    }

    AeTrainResult result;
    result.model = Autoencoder(width, options.encoder_widths);
    Rng init_rng(mix_seed(options.train.seed, "ae-init"));
    result.model.init(init_rng);

    const AxisStats stats = compute_axis_stats(clean_windows);
    for (std::size_t a = 0; a < kNumAxes; ++a) {
        result.model.noise_sigma[a] = options.noise_scale * stats.stddev[a];
    }

    std::vector<std::size_t> train_idx, val_idx;
    holdout_split(clean_windows.size(), options.train.val_fraction, options.train.seed, train_idx,
                  val_idx);
    if (train_idx.empty()) train_idx = val_idx;  // degenerate single-window input

    // fixed noisy corpora; noise seeds derive from (seed, window, copy)
    std::vector<detail::AePair> train_pairs, val_pairs;
    for (std::size_t idx : train_idx) {
        for (std::size_t k = 0; k < options.copies; ++k) {
            SignalWindow noisy = inject_noise(clean_windows[idx], result.model.noise_sigma,
                                              mix_seed(options.train.seed, idx, k));
            train_pairs.push_back({window_to_seq(noisy), &clean_windows[idx].values});
        }
    }
    for (std::size_t idx : val_idx) {
        SignalWindow noisy = inject_noise(clean_windows[idx], result.model.noise_sigma,
                                          mix_seed(options.train.seed, idx, 9001));
        val_pairs.push_back({window_to_seq(noisy), &clean_windows[idx].values});
    }
    if (val_pairs.empty()) {
        val_pairs.push_back(train_pairs.front());
    }

    ParameterSet params = result.model.parameters();
    Autoencoder& ae = result.model;

    result.initial_val_loss = detail::ae_eval_loss(ae, val_pairs);
    result.val_curve.push_back(result.initial_val_loss);
    result.curve.push_back({0, detail::ae_eval_loss(ae, train_pairs), 0.0});

    EarlyStopper stopper(options.train.patience, options.train.min_delta);
    std::vector<std::size_t> order(train_pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= options.train.max_epochs; ++epoch) {
        Rng epoch_rng(mix_seed(options.train.seed, "ae-epoch", epoch));
        epoch_rng.shuffle(order.begin(), order.end());
        double epoch_loss = 0.0;
        for (std::size_t batch_start = 0; batch_start < order.size();
             batch_start += options.train.batch_size) {
            const std::size_t batch_end =
                std::min(order.size(), batch_start + options.train.batch_size);
            params.zero_grad();
            double batch_loss = 0.0;
            for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
                const detail::AePair& p = train_pairs[order[bi]];
                Vec latent = ae.encoder.encode(p.noisy);
                Tensor decoded = ae.decoder.decode(latent, p.noisy.size());
                batch_loss += reconstruction_loss(*p.clean, decoded);
                Tensor d_out = decoded;
                for (std::size_t i = 0; i < d_out.size(); ++i) {
                    d_out[i] = 2.0 * (decoded[i] - (*p.clean)[i]);
                }
                Vec dlatent = ae.decoder.backward(d_out);
                ae.encoder.backward(dlatent, p.noisy.size());
            }
            const double count = static_cast<double>(batch_end - batch_start);
            if (!std::isfinite(batch_loss)) {
                throw TrainingDivergedError("train_autoencoder: non-finite loss at epoch " +
                                            std::to_string(epoch));
            }
            params.scale_grad(1.0 / count);
            adam_step(params, options.train.adam);
            epoch_loss += batch_loss;
        }
        result.curve.push_back({epoch, epoch_loss / static_cast<double>(train_pairs.size()), 0.0});
        const double val_loss = detail::ae_eval_loss(ae, val_pairs);
        result.val_curve.push_back(val_loss);
        result.epochs_run = epoch;
        if (stopper.should_stop(val_loss)) break;
    }
    result.final_val_loss = result.val_curve.back();
    return result;
}

// ---------------------------------------------------------------------------
// Augmentation
// ---------------------------------------------------------------------------

struct AugmentResult {
    WindowedDataset windows;            // decoded synthetic windows, 10x the input
    std::vector<LatentVector> latents;  // one encoder pass over each noisy copy
};

/// For every source window: make `copies` noisy variants, encode each once,
/// and decode each latent back to a synthetic window. Labels follow the
/// source. The latents are the classifier features in encoder-fed setups;
/// the decoded windows are the synthetic corpus.
inline AugmentResult augment(const WindowedDataset& train, Autoencoder& ae, std::uint64_t seed,
                             std::size_t copies = 10) {
    if (!train.empty() && train.width() != ae.window_width) {
        throw std::invalid_argument("augment: window width mismatch");
    }
    AugmentResult result;
    result.windows.seed = seed;
    for (std::size_t i = 0; i < train.size(); ++i) {
        const SignalWindow& src = train.windows[i];
        for (std::size_t k = 0; k < copies; ++k) {
            const std::uint64_t noise_seed = mix_seed(seed, i, k);
            SignalWindow noisy = inject_noise(src, ae.noise_sigma, noise_seed);
            LatentVector latent = ae.encode(noisy);
            latent.noise_seed = noise_seed;

            SignalWindow synthetic;
            synthetic.values = ae.decode(latent);
            synthetic.label = src.label;
            synthetic.origin = {src.origin.session_id, src.origin.start, true};
            result.windows.windows.push_back(std::move(synthetic));
            result.latents.push_back(std::move(latent));
        }
    }
    return result;
}

inline WindowedDataset augment_dataset(const WindowedDataset& train, Autoencoder& ae,
                                       std::uint64_t seed, std::size_t copies = 10) {
    return augment(train, ae, seed, copies).windows;
}

inline std::vector<LatentVector> augment_latents(const WindowedDataset& train, Autoencoder& ae,
                                                 std::uint64_t seed, std::size_t copies = 10) {
    return augment(train, ae, seed, copies).latents;
}

}  // namespace devent
